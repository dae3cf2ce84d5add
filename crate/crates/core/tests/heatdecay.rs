use rdcarleman::grid::*;
use rdcarleman::heatdecay::*;
use std::time::Instant;

#[test]
fn full_probe_grid_has_no_violations() {
    let start = Instant::now();
    let times = logspace(1e-4, 5.0, 50);
    let mut rows = Vec::new();
    for n in 2..=32 {
        for bc in [BoundaryKind::Dirichlet, BoundaryKind::Periodic] {
            let p = probe_1d(n, bc, 1.0, &times).unwrap();
            assert_eq!(p.violations(), 0, "n={n} {bc:?}: {:?}", p.rows.iter().find(|r| !r.ok));
            rows.extend(p.rows);
        }
    }
    assert!(rows.len() > 31 * 50 * 4);
    let mut buf = Vec::new();
    write_probe_csv(&rows, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), rows.len() + 1);
    assert!(start.elapsed().as_secs() < 120);
}

#[test]
fn multidimensional_norm_obeys_tensor_identity() {
    let times = logspace(1e-3, 2.0, 12);
    let (n, diff) = (5, 0.3);
    let one = Semigroup::new(&build_laplacian_1d(n, BoundaryKind::Dirichlet).unwrap().affine(diff, 0.0)).unwrap();
    for (d, d1) in [(2, 2), (2, 1), (3, 2)] {
        let g = GridSpec::new(n, d, d1).unwrap();
        let sg = Semigroup::new(&build_laplacian_nd(&g).unwrap().affine(diff, 0.0)).unwrap();
        let mu = mu1(n, BoundaryKind::Dirichlet) / 2.0;
        for &t in &times {
            let ex = sg.inf_norm(t);
            let prod = one.inf_norm(t).powi(d1 as i32);
            assert!(ex <= prod * (1.0 + 1e-10));
            assert!(ex <= piecewise_decay_bound(diff, d1, n, mu, t).unwrap() * (1.0 + 1e-10));
        }
    }
}

#[test]
fn piecewise_bound_across_breakpoint() {
    let (n, diff) = (8, 0.1);
    let mu = mu1(n, BoundaryKind::Dirichlet) / 2.0;
    let tb = piecewise_breakpoint(diff, n, mu);
    let times = logspace(tb / 100.0, tb * 100.0, 60);
    let sg = Semigroup::new(&build_laplacian_1d(n, BoundaryKind::Dirichlet).unwrap().affine(diff, 0.0)).unwrap();
    for &t in &times {
        assert!(sg.inf_norm(t) <= piecewise_decay_bound(diff, 1, n, mu, t).unwrap() * (1.0 + 1e-12));
    }
}

#[test]
fn integral_bound_holds_on_small_grids() {
    let times = [0.5, 2.0, 5.0];
    // (grid, D, a)
    let cases = [
        (GridSpec::dirichlet(8, 1).unwrap(), 0.012, 0.0196),
        (GridSpec::dirichlet(8, 1).unwrap(), 0.2, 0.0),
        (GridSpec::dirichlet(6, 1).unwrap(), 0.1, -0.3),
        (GridSpec::new(4, 2, 1).unwrap(), 0.05, 0.1),
    ];
    for (g, diff, a) in cases {
        let l1 = diff * g.d1 as f64 * mu1(g.n, BoundaryKind::Dirichlet) + a;
        for ratio in [2.3, 1.5, 4.0] {
            let rows = probe_integral(&g, diff, a, l1 / ratio, &[1, 2, 3], &times).unwrap();
            for r in &rows {
                assert!(r.ok, "{g:?} D={diff} a={a}: {r:?}");
            }
        }
    }
}
