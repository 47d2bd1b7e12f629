use rug::{Complex, Float, Rational};

use riccati_pade::hankel::HankelIndex;
use riccati_pade::models::{pure_quartic, qes_models, quartic, three_well};
use riccati_pade::potential::{Parity, PolynomialPotential};
use riccati_pade::precision::PrecisionPolicy;
use riccati_pade::scan::{three_well_point, ScanSettings};
use riccati_pade::solver::{bound_pair, converged_eigenvalue, refine_root, track_sequence, EnergyEstimate};

fn places(value: &Complex, re: &str, im: &str) -> f64 {
    let reference = Complex::with_val(
        512,
        (
            Float::parse(re).map(|p| Float::with_val(512, p)).unwrap(),
            Float::parse(im).map(|p| Float::with_val(512, p)).unwrap(),
        ),
    );
    let d = Complex::with_val(512, value - &reference);
    -Float::with_val(64, d.abs_ref()).log10().to_f64()
}

fn solve(potential: &PolynomialPotential, parity: Parity, offset: usize, seed: (f64, f64), digits: u32) -> EnergyEstimate {
    let policy = PrecisionPolicy::for_digits(digits);
    let guess = Complex::with_val(policy.working_bits, seed);
    let seq = track_sequence(potential, parity, offset, 2, 120, &guess, &policy).unwrap();
    converged_eigenvalue(&seq, digits).unwrap().0
}

#[test]
fn quartic_ground_and_first_excited() {
    let v = quartic(&Rational::from(1)).unwrap();
    let ground = solve(&v, Parity::Even, 0, (1.4, 0.0), 25);
    assert!(places(&ground.value, "1.39235164153029185565750787661", "0") > 25.0);
    let odd = solve(&v, Parity::Odd, 0, (5.0, 0.0), 20);
    assert!(places(&odd.value, "4.64881270421207753637", "0") > 18.0);
}

#[test]
fn pure_quartic_ground_state() {
    let ground = solve(&pure_quartic(), Parity::Even, 0, (1.0, 0.0), 25);
    assert!(places(&ground.value, "1.06036209048418289964704601669", "0") > 25.0);
}

#[test]
fn offsets_agree_on_the_limit() {
    let v = quartic(&Rational::from(1)).unwrap();
    let a = solve(&v, Parity::Even, 0, (1.4, 0.0), 20);
    let b = solve(&v, Parity::Even, 1, (1.4, 0.0), 20);
    let c = solve(&v, Parity::Even, 2, (1.4, 0.0), 20);
    let gap = |x: &EnergyEstimate, y: &EnergyEstimate| {
        -Float::with_val(64, Complex::with_val(256, &x.value - &y.value).abs_ref()).log10().to_f64()
    };
    assert!(gap(&a, &b) > 20.0 && gap(&a, &c) > 20.0);
}

#[test]
fn inverted_double_well_resonance() {
    let v = quartic(&Rational::from((-1, 10))).unwrap();
    let root = solve(&v, Parity::Even, 0, (0.9, -0.007), 20);
    // the conjugate is an equally valid root of the real determinant
    let lower = if root.im().is_sign_positive() { root.value.clone().conj() } else { root.value.clone() };
    assert!(places(&lower, "0.900672904092015024804721689", "-0.006693280875800130269271875") > 20.0);
}

#[test]
fn bound_pairs_nest() {
    let v = quartic(&Rational::from(1)).unwrap();
    let policy = PrecisionPolicy::for_digits(20);
    let exact = Float::with_val(256, Float::parse("1.392351641530291855657507876609934184600066711").unwrap());
    let mut previous: Option<(Float, Float)> = None;
    for d in [5, 10, 15] {
        let (lo, hi) = bound_pair(&v, Parity::Even, d, &policy).unwrap();
        let (lo, hi) = (lo.re().clone(), hi.re().clone());
        assert!(lo <= exact && exact <= hi, "D = {d}");
        if let Some((plo, phi)) = previous {
            assert!(plo <= lo && hi <= phi, "D = {d}");
        }
        previous = Some((lo, hi));
    }
}

#[test]
fn qes_energies_are_numeric_roots() {
    for model in qes_models() {
        let policy = PrecisionPolicy::for_digits(40);
        let guess = Complex::with_val(policy.working_bits, (model.exact_energy.to_f64() + 0.01, 0.0));
        let index = HankelIndex::new(model.dimension, 0).unwrap();
        let root = refine_root(&model.potential, model.parity, index, &guess, &policy).unwrap();
        let exact = Complex::with_val(256, (&model.exact_energy, 0));
        let d = Complex::with_val(256, &root.value - &exact);
        assert!(Float::with_val(64, d.abs_ref()).log10().to_f64() < -40.0, "{}", model.label);
    }
}

#[test]
fn three_well_coupling_point() {
    let settings = ScanSettings::new(1, PrecisionPolicy::for_digits(12));
    let point = three_well_point(&Rational::from((3, 10)), &settings).unwrap();
    assert!(places(&Complex::with_val(256, (point.bound.re(), 0)), "0.79167251399133920351", "0") > 12.0);
    assert!(places(&point.resonance, "0.81560795814733914293", "-0.029400216892153485663") > 12.0);
    assert!(point.resonance.imag().is_sign_negative());
    assert!(point.scaled_width > 0);
}

#[test]
fn three_well_rejects_bad_couplings() {
    assert!(three_well(&Rational::new(), 1).is_err());
    assert!(three_well(&Rational::from((1, 5)), 0).is_err());
}
