use std::path::PathBuf;

use coatfit::cavity::CavityAssembly;
use coatfit::description::parse_pairs_csv;
use coatfit::dispersion::{dataset_from_simulation, simulate_fixed_order, wavelength_grid, CoatingModel};

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/t95_reconstructed_pairs.csv")
}

fn regenerate() -> String {
    let model = CoatingModel { n_high: 2.0676, thickness_scale: 847.0 / 852.0, ..CoatingModel::nominal() };
    let template = CavityAssembly::symmetric(model.mirror().unwrap(), 0.0).unwrap();
    let l1 = wavelength_grid(820e-9, 900e-9, 4e-9).unwrap();
    let sim = simulate_fixed_order(&template, &model, &l1, 24.4).unwrap();
    let noisy = dataset_from_simulation(&sim, 0.01e-9)
        .unwrap()
        .with_noise(0.01e-9, 95, Some(0.01e-9))
        .unwrap();
    let mut out = String::from("lambda1_nm,lambda2_nm,sigma_nm\n");
    for p in &noisy.pairs {
        out += &format!("{:.2},{:.2},{:.2}\n", p.lambda_1 * 1e9, p.lambda_2 * 1e9, p.sigma * 1e9);
    }
    out
}

#[test]
fn reconstructed_pairs_fixture_is_current() {
    let fresh = regenerate();
    let path = fixture_path();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &fresh).unwrap();
    }
    let stored = std::fs::read_to_string(&path).expect("fixture missing; run with UPDATE_GOLDEN=1");
    assert_eq!(stored, fresh);
    let pairs = parse_pairs_csv(&stored).unwrap();
    assert_eq!(pairs.len(), 21);
}
