use proptest::prelude::*;
use quasidist::diagnostics::{check_kr_identities_of, check_marginals};
use quasidist::distributions::{kirkwood_rihaczek, sigma_kr};
use quasidist::fock::{alpha_grid, coherent_ket, generalized_kr, DensityMatrix};
use quasidist::fourier::{forward_fourier, inverse_fourier};
use quasidist::io::{read_qpsf, write_qpsf};
use quasidist::states::{cat_wave, coherent_wave, CoherentParams};
use quasidist::{PhaseGrid, PositionGrid, WaveField, C64};

fn grid() -> PositionGrid {
    PositionGrid::spanning(-10.0, 10.0, 128).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sigma_family_keeps_marginals(re in -2.0..2.0f64, im in -2.0..2.0f64, sigma in -2.0..2.0f64, cat in any::<bool>()) {
        let g = grid();
        let c = CoherentParams::new(C64::new(re, im)).unwrap();
        let psi = if cat { cat_wave(c, &g) } else { coherent_wave(c, &g) }.unwrap();
        let f = sigma_kr(&psi, sigma, &PhaseGrid::conjugate(&g)).unwrap();
        for r in check_marginals(&f, &psi).unwrap() {
            prop_assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn kr_modulus_factorizes(re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let g = grid();
        let psi = cat_wave(CoherentParams::new(C64::new(re, im)).unwrap(), &g).unwrap();
        let k = kirkwood_rihaczek(&psi, &PhaseGrid::conjugate(&g)).unwrap();
        for r in check_kr_identities_of(&k, &psi).unwrap() {
            prop_assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn fourier_round_trip(seed in prop::collection::vec(-1.0..1.0f64, 64)) {
        let g = PositionGrid::spanning(-4.0, 4.0, 32).unwrap();
        let vals: Vec<C64> = seed.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
        let psi = WaveField::from_raw(g, vals.clone()).unwrap();
        let back = inverse_fourier(&forward_fourier(&psi).unwrap()).unwrap();
        for (a, b) in back.values().iter().zip(&vals) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn qpsf_round_trip_is_bit_exact(re in -1.5..1.5f64, im in -1.5..1.5f64, eighths in -8i32..24) {
        // the 16-byte tag holds sigma only when its decimal form is short
        let sigma = f64::from(eighths) / 8.0;
        let g = PositionGrid::spanning(-10.0, 10.0, 64).unwrap();
        let psi = coherent_wave(CoherentParams::new(C64::new(re, im)).unwrap(), &g).unwrap();
        let f = sigma_kr(&psi, sigma, &PhaseGrid::conjugate(&g)).unwrap();
        let mut buf = Vec::new();
        write_qpsf(&f, &mut buf).unwrap();
        let back = read_qpsf(buf.as_slice()).unwrap();
        prop_assert_eq!(back.grid, f.grid);
        prop_assert!(back.values.iter().zip(&f.values).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
    }

    #[test]
    fn fock_wigner_is_real(re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let rho = DensityMatrix::pure(&coherent_ket(CoherentParams::new(C64::new(re, im)).unwrap(), 48).unwrap()).unwrap();
        let w = generalized_kr(&rho, &alpha_grid((-2.0, 2.0, 9), (-2.0, 2.0, 9)).unwrap(), 0.0).unwrap();
        prop_assert!(w.max_abs_imag() < 1e-12);
    }
}
