use super::trees::{ary_tree, regular_tree};
use super::*;
use crate::graph::{ball, fixtures::petersen};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn grid() -> Vec<Complex64> {
    let mut out = Vec::new();
    for a in 0..10 {
        for b in 0..5 {
            out.push(c(-2.7 + 0.6 * a as f64, 0.02 + 0.4 * (b * b) as f64));
        }
    }
    out
}

#[test]
fn regular_tree_distance_zero() {
    for d in [3, 4, 10] {
        let z = c(0.3, 0.7);
        let q = TreeGreenQuery {
            d,
            z,
            kind: TreeKind::Regular,
            dist: 0,
            anc: None,
        };
        assert_eq!(tree_green(&q).unwrap(), m_d_unchecked(d, z));
    }
}

#[test]
fn ary_root_is_semicircle() {
    for d in [3, 4, 10] {
        for z in grid() {
            let q = TreeGreenQuery {
                d,
                z,
                kind: TreeKind::Ary,
                dist: 0,
                anc: Some(0),
            };
            let v = tree_green(&q).unwrap();
            assert!((v - m_sc_unchecked(z)).norm() < 1e-12, "d={d} z={z}");
            for dist in 1..6 {
                let q = TreeGreenQuery { dist, ..q };
                let r = -m_sc_unchecked(z) / ((d - 1) as f64).sqrt();
                let expected = m_sc_unchecked(z) * r.powu(dist as u32);
                assert!((tree_green(&q).unwrap() - expected).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn tree_green_errors() {
    let q = TreeGreenQuery {
        d: 3,
        z: c(0.0, 1.0),
        kind: TreeKind::Ary,
        dist: 2,
        anc: None,
    };
    assert!(matches!(tree_green(&q), Err(Error::MissingAnc)));
    let q = TreeGreenQuery {
        kind: TreeKind::Regular,
        z: c(1.0, 0.0),
        ..q
    };
    assert!(tree_green(&q).is_err());
}

#[test]
fn single_vertex_extension_is_kesten_mckay() {
    let b = Ball::from_parts(vec![7], vec![]);
    for d in [3, 5] {
        let z = c(0.2, 0.9);
        let spec = ExtensionWeightSpec {
            delta: m_sc_unchecked(z),
            convention: WeightConvention::DegreeDeficit,
            w: z,
        };
        let p = p_extension(&b, d, &spec, &[]).unwrap();
        assert!((p.entry(7, 7).unwrap() - m_d_unchecked(d, z)).norm() < 1e-14);
    }
}

/// Degree-deficit extension of a finite tree ball reproduces the
/// infinite-tree Green's function on every entry.
#[test]
fn extension_of_tree_ball_matches_infinite_tree() {
    for d in [3, 4] {
        let (b, depth) = regular_tree(d, 3);
        for z in [c(0.0, 1.0), c(0.5, 0.5), c(2.1, 0.05)] {
            let spec = ExtensionWeightSpec {
                delta: m_sc_unchecked(z),
                convention: WeightConvention::DegreeDeficit,
                w: z,
            };
            let p = p_extension(&b, d, &spec, &[]).unwrap();
            assert!((p.entry(0, 0).unwrap() - m_d_unchecked(d, z)).norm() < 1e-10);
            for (v, &dist) in depth.iter().enumerate() {
                let q = TreeGreenQuery {
                    d,
                    z,
                    kind: TreeKind::Regular,
                    dist,
                    anc: None,
                };
                assert!((p.entry(0, v).unwrap() - tree_green(&q).unwrap()).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn extension_decays_with_distance() {
    let d = 3;
    let (b, depth) = regular_tree(d, 4);
    let z = c(0.3, 0.4);
    let spec = ExtensionWeightSpec {
        delta: m_sc_unchecked(z),
        convention: WeightConvention::DegreeDeficit,
        w: z,
    };
    let p = p_extension(&b, d, &spec, &[]).unwrap();
    let mut by_depth = [0.0f64; 5];
    for (v, &k) in depth.iter().enumerate() {
        by_depth[k] = by_depth[k].max(p.entry(0, v).unwrap().norm());
    }
    assert!(by_depth.windows(2).all(|w| w[1] < w[0]));
    let rate = m_sc_unchecked(z).norm() / 2f64.sqrt();
    for (k, v) in by_depth.iter().enumerate() {
        assert!(*v <= 2.0 * rate.powi(k as i32));
    }
}

#[test]
fn extension_with_removed_vertex() {
    // removing a neighbor of the root: the root sees d-1 branches plus
    // the missing weight
    let d = 3;
    let (b, _) = regular_tree(d, 3);
    let z = c(0.1, 0.8);
    let spec = ExtensionWeightSpec {
        delta: m_sc_unchecked(z),
        convention: WeightConvention::DegreeDeficit,
        w: z,
    };
    let full = p_extension(&b, d, &spec, &[]).unwrap();
    let minor = p_extension(&b, d, &spec, &[1]).unwrap();
    assert!(minor.entry(1, 1).is_none());
    // Schur complement: P^{(1)}_00 = P_00 - P_01^2 / P_11
    let (p00, p01, p11) = (
        full.entry(0, 0).unwrap(),
        full.entry(0, 1).unwrap(),
        full.entry(1, 1).unwrap(),
    );
    assert!((minor.entry(0, 0).unwrap() - (p00 - p01 * p01 / p11)).norm() < 1e-12);
}

#[test]
fn ball_in_petersen_is_not_a_tree() {
    // girth 5: the radius-2 ball is all of Petersen and the extension no
    // longer equals m_d
    let g = petersen();
    let b = ball(&g, &[0], 2).unwrap();
    let z = c(0.0, 1.0);
    let spec = ExtensionWeightSpec {
        delta: m_sc_unchecked(z),
        convention: WeightConvention::DegreeDeficit,
        w: z,
    };
    let p = p_extension(&b, 3, &spec, &[]).unwrap();
    assert!((p.entry(0, 0).unwrap() - m_d_unchecked(3, z)).norm() > 1e-3);
    let b1 = ball(&g, &[0], 1).unwrap();
    let p1 = p_extension(&b1, 3, &spec, &[]).unwrap();
    assert!((p1.entry(0, 0).unwrap() - m_d_unchecked(3, z)).norm() < 1e-12);
}

#[test]
fn y_base_case() {
    let (delta, w) = (c(0.1, 0.3), c(-0.4, 0.2));
    assert_eq!(y_ell(3, 0, delta, w), 1.0 / (-w - delta));
}

#[test]
fn y_matches_boundary_weighted_ary_tree() {
    for d in [3, 4, 10] {
        let max_ell = if d == 10 { 3 } else { 5 };
        for ell in 0..=max_ell {
            let (b, _) = ary_tree(d, ell);
            for (delta, w) in [(c(0.1, 0.3), c(-0.4, 0.2)), (c(-0.5, 0.6), c(1.2, 0.1))] {
                let spec = ExtensionWeightSpec {
                    delta,
                    convention: WeightConvention::BoundaryOnly,
                    w,
                };
                let p = p_extension(&b, d, &spec, &[]).unwrap();
                let y = y_ell(d, ell, delta, w);
                assert!((p.entry(0, 0).unwrap() - y).norm() < 1e-10, "d={d} ell={ell}");
            }
        }
    }
}

#[test]
fn x_matches_degree_deficit_regular_tree() {
    for d in [3, 4, 10] {
        let max_ell = match d {
            3 => 6,
            4 => 5,
            _ => 3,
        };
        for ell in 0..=max_ell {
            let (b, _) = regular_tree(d, ell);
            for (delta, w) in [(c(0.1, 0.3), c(-0.4, 0.2)), (m_sc_unchecked(c(0.0, 1.0)), c(0.0, 1.0))] {
                let spec = ExtensionWeightSpec {
                    delta,
                    convention: WeightConvention::DegreeDeficit,
                    w,
                };
                let p = p_extension(&b, d, &spec, &[]).unwrap();
                let x = x_ell(d, ell, delta, w);
                assert!((p.entry(0, 0).unwrap() - x).norm() < 1e-10, "d={d} ell={ell}");
            }
        }
    }
}

#[test]
fn fixed_points_on_grid() {
    for d in [3, 4, 10] {
        for z in grid() {
            let m = m_sc_unchecked(z);
            for ell in 0..=12 {
                assert!((y_ell(d, ell, m, z) - m).norm() <= 1e-12, "d={d} ell={ell} z={z}");
                assert!((x_ell(d, ell, m, z) - m_d_unchecked(d, z)).norm() <= 1e-12);
            }
        }
    }
}

#[test]
fn conjugate_symmetry() {
    let (delta, w) = (c(0.2, 0.4), c(0.7, 0.3));
    for ell in 0..6 {
        assert!((x_ell(4, ell, delta.conj(), w.conj()) - x_ell(4, ell, delta, w).conj()).norm() < 1e-15);
        assert!((y_ell(4, ell, delta.conj(), w.conj()) - y_ell(4, ell, delta, w).conj()).norm() < 1e-15);
    }
}

#[test]
fn forward_derivatives_match_differences() {
    let h = 1e-6;
    for ell in [0, 1, 4, 9] {
        for (delta, w) in [(c(0.1, 0.3), c(-0.4, 0.2)), (c(-0.3, 0.5), c(0.5, 0.5))] {
            let y = y_ell_dual(ell, delta, w);
            let fd_delta = (y_ell(3, ell, delta + h, w) - y_ell(3, ell, delta - h, w)) / (2.0 * h);
            let fd_w = (y_ell(3, ell, delta, w + h) - y_ell(3, ell, delta, w - h)) / (2.0 * h);
            assert!((y.d_delta - fd_delta).norm() < 1e-7 * (1.0 + fd_delta.norm()));
            assert!((y.d_w - fd_w).norm() < 1e-7 * (1.0 + fd_w.norm()));
            let x = x_ell_dual(5, ell, delta, w);
            let fx = (x_ell(5, ell, delta + h, w) - x_ell(5, ell, delta - h, w)) / (2.0 * h);
            assert!((x.d_delta - fx).norm() < 1e-7 * (1.0 + fx.norm()));
        }
    }
}

#[test]
fn derivative_at_fixed_point_is_geometric() {
    // at (m_sc, z) the Delta-derivative is exactly m^{2l+2} and the
    // w-derivative is m^2 + ... + m^{2l+2}
    let z = c(0.5, 0.5);
    let m = m_sc_unchecked(z);
    for ell in 0..10 {
        let y = y_ell_dual(ell, m, z);
        assert!((y.d_delta - m.powu(2 * ell as u32 + 2)).norm() < 1e-13);
        assert!((y.d_w - y_w_coefficient(ell, z)).norm() < 1e-13);
        // |m| < 1 keeps both bounded by a multiple of ell + 1
        assert!(y.d_delta.norm() <= 1.0 && y.d_w.norm() <= (ell + 1) as f64);
    }
}

#[test]
fn quadratic_coefficient_simplifies() {
    // q = m^{2l+3} (1 - m^{2l+2}) / (1 - m^2), using m_d = m (d-1)/(d-1-m^2)
    for d in [3, 4, 10] {
        for z in grid() {
            let m = m_sc_unchecked(z);
            for ell in 0..8 {
                let p = m.powu(2 * ell as u32 + 2);
                let simple = m.powu(2 * ell as u32 + 3) * (1.0 - p) / (1.0 - m * m);
                let q = y_quadratic_coefficient(d, ell, z);
                assert!((q - simple).norm() < 1e-11 * (1.0 + q.norm()), "d={d} z={z}");
            }
        }
    }
}

#[test]
fn quadratic_coefficient_matches_second_difference() {
    let z = c(0.5, 0.5);
    let m = m_sc_unchecked(z);
    let h = 1e-4;
    for ell in 0..6 {
        let second = (y_ell(3, ell, m + h, z) - 2.0 * m + y_ell(3, ell, m - h, z)) / (h * h);
        let q = y_quadratic_coefficient(3, ell, z);
        assert!((second / 2.0 - q).norm() < 1e-5, "ell={ell}");
    }
}

#[test]
fn expansion_at_the_fixed_point() {
    let r = expansion_check(3, 2, c(0.5, 0.5), &[], &[]).unwrap();
    assert!(r.fixed_point_residual < 1e-12);
    assert!(r.linear_rel_err < 1e-2);
    assert!(r.w_linear_rel_err < 1e-2);
}

#[test]
fn expansion_residuals_are_cubic() {
    let z = c(0.5, 0.5);
    for ell in [1, 2, 3] {
        let offs: Vec<Complex64> = [0.02, 0.01, 0.005].iter().map(|&e| c(e, 0.5 * e)).collect();
        let r = expansion_check(3, ell, z, &offs, &offs).unwrap();
        for w in r.delta_residuals.windows(2) {
            assert!(w[0] / w[1] >= 6.0, "ell={ell} {:?}", r.delta_residuals);
        }
        // the w-direction keeps a quadratic term, so halving gives ~4x
        for w in r.w_residuals.windows(2) {
            assert!(w[0] / w[1] >= 3.5, "ell={ell} {:?}", r.w_residuals);
        }
    }
}

#[test]
fn expansion_rejects_large_offsets() {
    let z = c(0.5, 0.5);
    assert!(matches!(
        expansion_check(3, 4, z, &[c(0.07, 0.0)], &[]),
        Err(Error::OffsetsTooLarge(_))
    ));
    assert!(expansion_check(3, 4, z, &[c(0.05, 0.0)], &[]).is_ok());
}
