//! Exact arithmetic: Gaussian integers, 2×2 matrices over `Z[i]` scaled by
//! powers of `1/√2`, and dyadic rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{PrimInt, Signed};
use serde::{Deserialize, Serialize};

/// Integer types usable as Gaussian-integer components.
pub trait ExactInt: PrimInt + Signed + fmt::Debug {}

impl<T: PrimInt + Signed + fmt::Debug> ExactInt for T {}

/// A Gaussian integer `re + im·i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gaussian<T> {
    pub re: T,
    pub im: T,
}

impl<T: ExactInt> Gaussian<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::new(T::one(), T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one())
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// Squared modulus `re² + im²`.
    pub fn norm(self) -> T {
        self.re * self.re + self.im * self.im
    }

    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// True when `1 + i` divides `self` in `Z[i]`.
    pub fn divisible_by_one_plus_i(self) -> bool {
        ((self.re + self.im) % (T::one() + T::one())).is_zero()
    }

    /// Exact quotient by `1 + i`; the caller checks divisibility first.
    pub fn div_one_plus_i(self) -> Self {
        let two = T::one() + T::one();
        Self::new((self.re + self.im) / two, (self.im - self.re) / two)
    }

    /// Multiplies by `i^k`.
    pub fn mul_i_pow(self, k: u8) -> Self {
        match k % 4 {
            0 => self,
            1 => Self::new(-self.im, self.re),
            2 => Self::new(-self.re, -self.im),
            _ => Self::new(self.im, -self.re),
        }
    }
}

impl<T: ExactInt> Add for Gaussian<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl<T: ExactInt> Sub for Gaussian<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl<T: ExactInt> Neg for Gaussian<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl<T: ExactInt> Mul for Gaussian<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// The operator `2^{-k/2} · M` with `M` a 2×2 Gaussian-integer matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Unitary2<T> {
    pub m: [[Gaussian<T>; 2]; 2],
    pub k: u32,
}

impl<T: ExactInt> Unitary2<T> {
    pub fn new(m: [[Gaussian<T>; 2]; 2], k: u32) -> Self {
        Self { m, k }
    }

    fn from_ints(e: [[(i8, i8); 2]; 2], k: u32) -> Self {
        let g = |(a, b): (i8, i8)| {
            Gaussian::new(T::from(a).expect("small"), T::from(b).expect("small"))
        };
        Self::new([[g(e[0][0]), g(e[0][1])], [g(e[1][0]), g(e[1][1])]], k)
    }

    pub fn identity() -> Self {
        Self::from_ints([[(1, 0), (0, 0)], [(0, 0), (1, 0)]], 0)
    }

    pub fn pauli_x() -> Self {
        Self::from_ints([[(0, 0), (1, 0)], [(1, 0), (0, 0)]], 0)
    }

    pub fn pauli_y() -> Self {
        Self::from_ints([[(0, 0), (0, -1)], [(0, 1), (0, 0)]], 0)
    }

    pub fn pauli_z() -> Self {
        Self::from_ints([[(1, 0), (0, 0)], [(0, 0), (-1, 0)]], 0)
    }

    pub fn hadamard() -> Self {
        Self::from_ints([[(1, 0), (1, 0)], [(1, 0), (-1, 0)]], 1)
    }

    pub fn phase_s() -> Self {
        Self::from_ints([[(1, 0), (0, 0)], [(0, 0), (0, 1)]], 0)
    }

    /// `R_P = (I − iP)/√2` for a Hermitian Gaussian-integer matrix `P`.
    pub fn rotation(p: &Self) -> Self {
        assert_eq!(p.k, 0, "rotation expects an unscaled Pauli matrix");
        let id = Self::identity();
        let mut m = id.m;
        for (r, row) in m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = id.m[r][c] - p.m[r][c].mul_i_pow(1);
            }
        }
        Self::new(m, 1)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new(
            [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
            self.k,
        )
    }

    pub fn scale(&self, phase_i_pow: u8) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for e in row.iter_mut() {
                *e = e.mul_i_pow(phase_i_pow);
            }
        }
        out
    }

    pub fn trace(&self) -> Gaussian<T> {
        self.m[0][0] + self.m[1][1]
    }

    /// `|tr|²` as an exact dyadic `norm(tr) · 2^{-k}`.
    pub fn abs_trace_sq(&self) -> Dyadic {
        let n = self.trace().norm();
        Dyadic::new(n.to_u64().expect("non-negative norm"), self.k)
    }

    pub fn is_traceless(&self) -> bool {
        self.trace().is_zero()
    }

    /// Factors out `1 + i` while every entry is divisible by it. The result
    /// equals `self` up to a global phase `e^{iπ/4·r}`.
    pub fn reduced(&self) -> Self {
        let mut out = *self;
        while out.k > 0
            && out
                .m
                .iter()
                .flatten()
                .all(|e| e.divisible_by_one_plus_i())
        {
            for e in out.m.iter_mut().flatten() {
                *e = e.div_one_plus_i();
            }
            out.k -= 1;
        }
        out
    }

    /// Exact equality as operators (same scale after bringing both to the
    /// larger exponent). Scales differing by an odd power are never equal for
    /// Gaussian-integer matrices, except the zero matrix.
    pub fn equals(&self, other: &Self) -> bool {
        let (a, b) = if self.k <= other.k { (self, other) } else { (other, self) };
        let diff = b.k - a.k;
        if diff % 2 == 1 {
            return false;
        }
        let f = T::from(1u64 << (diff / 2)).expect("scale fits");
        let f = Gaussian::new(f, T::zero());
        a.m.iter()
            .flatten()
            .zip(b.m.iter().flatten())
            .all(|(x, y)| *x * f == *y)
    }

    /// Equality up to a phase in `{1, i, −1, −i}` or an odd power of `e^{iπ/4}`.
    pub fn equals_up_to_phase(&self, other: &Self) -> bool {
        let a = self.reduced();
        let b = other.reduced();
        (0..4).any(|r| a.scale(r).equals(&b))
    }
}

impl<T: ExactInt> Mul for Unitary2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        let e = |r: usize, c: usize| a[r][0] * b[0][c] + a[r][1] * b[1][c];
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]], self.k + o.k)
    }
}

/// A non-negative dyadic rational `num · 2^{-log2_den}` kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    pub num: u64,
    pub log2_den: u32,
}

impl Dyadic {
    pub fn new(num: u64, log2_den: u32) -> Self {
        let mut d = Self { num, log2_den };
        if d.num == 0 {
            d.log2_den = 0;
        }
        while d.num != 0 && d.num % 2 == 0 && d.log2_den > 0 {
            d.num /= 2;
            d.log2_den -= 1;
        }
        d
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.log2_den as i32)
    }

    pub fn mul_pow2_inv(&self, extra: u32) -> Self {
        Self::new(self.num, self.log2_den + extra)
    }

    pub fn to_ratio(&self) -> num_rational::Ratio<u128> {
        num_rational::Ratio::new(self.num as u128, 1u128 << self.log2_den)
    }
}

impl Add for Dyadic {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let k = self.log2_den.max(o.log2_den);
        let a = self.num << (k - self.log2_den);
        let b = o.num << (k - o.log2_den);
        Self::new(a + b, k)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.log2_den)
        }
    }
}
