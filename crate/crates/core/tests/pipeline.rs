use num_rational::Ratio;

use cubecycle::eigen::eigvalsh;
use cubecycle::graph::{
    block_partition, clusterness_ratio, cube_cycle_product, laplacian, vertex_substitution,
    write_laplacian_matrix_market, Graph,
};
use cubecycle::io::read_matrix_market;
use cubecycle::sampling::{concentration_report, conjecture_report, substitution_ssl};
use cubecycle::spectral::{ssl_eigen, SpatialMask, SslTolerances};
use cubecycle::structured::{
    cartesian_dims, cartesian_pq_spectrum, cartesian_pw_eigenbasis, substitution_eigenbasis, substitution_pw_basis,
};

#[test]
fn edge_list_round_trip() {
    let g = vertex_substitution(3, 4).unwrap();
    let mut buf = Vec::new();
    g.write_edge_list(&mut buf).unwrap();
    let back = Graph::read_edge_list(g.order(), std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back.edges(), g.edges());
}

#[test]
fn laplacian_matrix_market_round_trip() {
    let g = cube_cycle_product(2, 3).unwrap();
    let mut buf = Vec::new();
    write_laplacian_matrix_market(&g, &mut buf).unwrap();
    let read = read_matrix_market(buf.as_slice()).unwrap();
    let l = laplacian(&g);
    for i in 0..g.order() {
        for j in 0..g.order() {
            assert_eq!(read[(i, j)].re, l.matrix()[(i, j)]);
            assert_eq!(read[(i, j)].im, 0.0);
        }
    }
}

#[test]
fn cluster_ratios() {
    let g = vertex_substitution(3, 5).unwrap();
    let parts = block_partition(g.order(), 8);
    // 12 intra edges per cube against one bridge per cube
    assert_eq!(clusterness_ratio(&g, &parts).unwrap(), Ratio::new(60, 65));
    let cart = cube_cycle_product(3, 5).unwrap();
    assert_eq!(clusterness_ratio(&cart, &parts).unwrap(), Ratio::new(60, 100));
}

#[test]
fn analytic_export_matches_graph() {
    let dir = tempfile::tempdir().unwrap();
    let b = substitution_pw_basis(2, 5, 2.0).unwrap();
    b.export(dir.path(), "pw").unwrap();
    let manifest = std::fs::read_to_string(dir.path().join("pw_manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert!(v.to_string().contains("Dirichlet") || v.to_string().contains("Neumann"));
    let g = vertex_substitution(2, 5).unwrap();
    assert!(b.pw_space(2.0).unwrap().invariance_defect(&g).unwrap() < 1e-12);
}

#[test]
fn dense_and_analytic_pq_agree() {
    // PQ on the block-0 mask through the analytic basis and through a dense
    // eigendecomposition of the full Laplacian
    let g = vertex_substitution(3, 5).unwrap();
    let analytic = substitution_pw_basis(3, 5, 2.0)
        .unwrap()
        .to_real()
        .unwrap()
        .pw_space(2.0)
        .unwrap();
    let dense = cubecycle::spectral::pw_space(&cubecycle::spectral::graph_fourier(&g).unwrap(), 2.0, 1e-9).unwrap();
    assert_eq!(analytic.dim(), dense.dim());
    let mask = SpatialMask::block(40, 8, 0).unwrap();
    let a = ssl_eigen(&analytic, &mask).unwrap();
    let d = ssl_eigen(&dense, &mask).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&d.eigenvalues) {
        assert!((x - y).abs() < 1e-11);
    }
}

#[test]
fn cartesian_pq_matches_closed_form() {
    for (n, m, k) in [(3u32, 5usize, 1u32), (4, 7, 2), (4, 9, 3)] {
        let pw = cartesian_pw_eigenbasis(n, m, 2.0 * k as f64).unwrap();
        let dims = cartesian_dims(n, m, k).unwrap();
        assert_eq!(pw.dim() as u64, dims.iter().sum::<u64>());
        let mask = SpatialMask::block(pw.ambient_dim(), 1 << n, 0).unwrap();
        let r = ssl_eigen(&pw, &mask).unwrap();
        let mut expect: Vec<f64> = cartesian_pq_spectrum(n, m, k)
            .unwrap()
            .into_iter()
            .flat_map(|(v, c)| std::iter::repeat(v).take(c as usize))
            .collect();
        expect.resize(pw.dim(), 0.0);
        for (x, y) in r.eigenvalues.iter().zip(&expect) {
            assert!((x - y).abs() < 1e-10, "({n},{m},{k}): {x} vs {y}");
        }
    }
}

#[test]
fn conjecture_for_a_mid_sized_case() {
    let s = substitution_ssl(5, 2, 9, SslTolerances::default()).unwrap();
    let r = conjecture_report(&s).unwrap();
    assert_eq!(r.dim_k, 16);
    assert_eq!(r.count_one + r.count_mid + r.count_small, r.dim);
    assert_eq!(r.expected_rank, 9 * 15);
    let c = concentration_report(&s, 10, 3).unwrap();
    assert_eq!(c.upper_failures, 0);
    assert!(c.samples.len() == 90);
}

#[test]
fn full_analytic_basis_diagonalizes() {
    for (n, m) in [(2u32, 4usize), (3, 6), (4, 3)] {
        let g = vertex_substitution(n, m).unwrap();
        let b = substitution_eigenbasis(n, m).unwrap();
        let resid = cubecycle::structured::substitution::eigen_residual(&g, &b.vectors, &b.values()).unwrap();
        assert!(resid < 1e-11);
        let mut vals = b.values();
        vals.sort_by(f64::total_cmp);
        let dense = eigvalsh(&laplacian(&g)).unwrap();
        assert!(vals.iter().zip(&dense).all(|(a, b)| (a - b).abs() < 1e-10));
    }
}
