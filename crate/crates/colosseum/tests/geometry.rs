use std::f64::consts::PI;

use colosseum::geometry::{check_locality, check_locality_with, colosseum_layout, inner_spacing, GeometryError};
use colosseum::Layout3D;
use colosseum::surface_code::{SiteRole, WedgeLayout};

const KAPPA: f64 = 1.5;

#[test]
fn colosseum_layouts_are_local_at_one_kappa() {
    let mut occupancy = Vec::new();
    for n in [8, 16, 32] {
        let layout = colosseum_layout(n, 3, 1.0, 1.0).unwrap();
        let w = WedgeLayout::new(3).unwrap();
        assert_eq!(layout.sites.len(), n * w.n_qubits());
        let report = check_locality(&layout, KAPPA);
        assert!(report.pass, "n={n}: {report:?}");
        occupancy.push(report.max_ball_occupancy);
    }
    // The ring only grows along the circumference, so local density is flat.
    assert!(occupancy.windows(2).all(|w| w[1] <= w[0] + 2), "{occupancy:?}");
}

#[test]
fn ring_edges_join_matching_face_sites() {
    let n = 8;
    let w = WedgeLayout::new(3).unwrap();
    let layout: Layout3D = colosseum_layout(n, 3, 1.0, 1.0).unwrap();
    let per = w.n_qubits();
    for j in 0..n {
        for q in 0..w.m {
            let (a, b) = (j * per + w.m + q, ((j + 1) % n) * per + q);
            assert!(layout.has_edge(a, b));
            assert_eq!(layout.sites[a].role, SiteRole::FaceR);
            assert_eq!(layout.sites[b].role, SiteRole::FaceL);
            // Same height, neighbouring angle.
            assert!((layout.sites[a].pos[2] - layout.sites[b].pos[2]).abs() < 1e-12);
        }
    }
}

#[test]
fn stretched_layout_fails_locality() {
    let layout = colosseum_layout(8, 3, 3.0, 1.0).unwrap();
    let report = check_locality(&layout, KAPPA);
    assert!(!report.pass);
    assert!(report.max_edge_length > KAPPA);
}

#[test]
fn crowded_layout_fails_the_occupancy_bound() {
    let layout = colosseum_layout(8, 3, 1.0, 1.0).unwrap();
    let report = check_locality_with(&layout, 10.0, 64);
    assert!(report.max_edge_length <= 10.0);
    assert!(!report.pass && report.max_ball_occupancy > 64);
}

#[test]
fn single_wedge_passes() {
    for d in [1, 3, 5] {
        let w = WedgeLayout::new(d).unwrap();
        let layout: Layout3D = Layout3D::from_wedge(&w, 1.0);
        let report = check_locality(&layout, KAPPA);
        assert!(report.pass, "d={d}: {report:?}");
    }
}

#[test]
fn inner_spacing_matches_the_formula() {
    for n in [3, 8, 16, 32, 1000] {
        for (d_out, d_r) in [(1.0, 1.0), (2.5, 0.3), (1.0, 0.01)] {
            let expect = d_out - 2.0 * PI * d_r / n as f64;
            let got = inner_spacing(n, d_out, d_r);
            assert!(((got - expect) / expect).abs() < 1e-12, "n={n}");
        }
    }
    // Independent route: circumference difference of the two circles over the sheet count.
    let (n, sheets, d_out, d_r) = (16usize, 5usize, 1.0f64, 0.7f64);
    let r_out = d_out * (sheets * n) as f64 / (2.0 * PI);
    let r_in = r_out - sheets as f64 * d_r;
    let via_circles = 2.0 * PI * r_in / (sheets * n) as f64;
    let formula = d_out - 2.0 * PI * sheets as f64 * d_r / (sheets * n) as f64;
    assert!((via_circles - formula).abs() < 1e-12);
    assert!((inner_spacing(n, d_out, d_r) - via_circles).abs() < 1e-12);
}

#[test]
fn f32_layout_agrees_with_f64() {
    let a = colosseum_layout::<f64>(8, 3, 1.0, 1.0).unwrap();
    let b = colosseum_layout::<f32>(8, 3, 1.0, 1.0).unwrap();
    for (s, t) in a.sites.iter().zip(&b.sites) {
        for i in 0..3 {
            assert!((s.pos[i] - t.pos[i] as f64).abs() < 1e-3);
        }
    }
    assert_eq!(check_locality(&a, 1.5).pass, check_locality(&b, 1.5f32).pass);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert_eq!(colosseum_layout(1, 3, 1.0, 1.0).unwrap_err(), GeometryError::TooFewWedges(1));
    assert_eq!(colosseum_layout(8, 3, 0.0, 1.0).unwrap_err(), GeometryError::NonPositiveSpacing);
    assert!(matches!(colosseum_layout(4, 3, 1.0, 1.0), Err(GeometryError::InnerSpacing(_))));
    assert!(matches!(colosseum_layout(8, 4, 1.0, 1.0), Err(GeometryError::Code(_))));
}
