use dihedral::cmform::CMForm;
use dihedral::dirichlet::DirichletChar;
use dihedral::hecke::{CharSpec, HeckeChar};
use dihedral::lvalue::{calibrate, completed_l, dirichlet_sum, fe_residual, LSeriesSpec};
use dihedral::mp;
use dihedral::qfield::QuadField;
use rug::ops::Pow;
use rug::{Complex, Float};

fn c(re: f64, im: f64, prec: u32) -> Complex {
    Complex::with_val(prec, (re, im))
}

#[test]
fn dedekind_zeta_is_zeta_times_kronecker() {
    let prec = 192;
    let field = QuadField::new(-7).unwrap();
    let zk = calibrate(&LSeriesSpec::dedekind(field), prec).unwrap();
    let z = calibrate(&LSeriesSpec::dirichlet(&DirichletChar::trivial(1)), prec).unwrap();
    let lw = calibrate(&LSeriesSpec::dirichlet(&field.omega_k()), prec).unwrap();
    for s in [c(2.0, 0.0, prec), c(3.0, 0.0, prec), c(2.5, 0.0, prec), c(0.5, 3.0, prec)] {
        let a = completed_l(&zk, &s, prec).unwrap().value;
        let b = completed_l(&z, &s, prec).unwrap().value * completed_l(&lw, &s, prec).unwrap().value;
        assert!(mp::rel_err(&a, &b) < 1e-25, "s = {s}");
    }
}

#[test]
fn dirichlet_root_numbers_match_gauss_sums() {
    let prec = 160;
    for q in [3i64, 4, 5, 7, 8, 12, 13] {
        for chi in DirichletChar::all(q).into_iter().filter(|x| x.is_primitive()) {
            let spec = calibrate(&LSeriesSpec::dirichlet(&chi), prec).unwrap();
            let nu = chi.parity() as u32;
            let i_nu = Complex::with_val(prec, (0, 1)).pow(nu);
            let sq = Float::with_val(prec, q).sqrt();
            let expected = chi.gauss_sum(prec) / (i_nu * sq);
            let got = spec.root_number.clone().unwrap();
            assert!(mp::rel_err(&got, &expected) < 1e-25, "q = {q} index {}", chi.index());
        }
    }
}

#[test]
fn cm_form_functional_equation_and_overlap() {
    let prec = 192;
    let f = CMForm::new(HeckeChar::from_spec(&CharSpec::unramified(-7, 3)).unwrap());
    let spec = calibrate(&LSeriesSpec::form(f), prec).unwrap();
    let eps = spec.root_number.clone().unwrap();
    let modulus = Float::with_val(prec, eps.abs_ref()).to_f64();
    assert!((modulus - 1.0).abs() < 1e-40);
    for (re, im) in [(1.5, 0.0), (2.25, 0.5), (0.3, -1.0), (3.1, 2.0)] {
        let r = fe_residual(&spec, &c(re, im, prec), prec).unwrap();
        assert!(r < 2f64.powi(-96), "residual {r} at {re}+{im}i");
    }
    let s = c(26.0, 1.0, prec);
    let a = completed_l(&spec, &s, prec).unwrap().value;
    let (b, _) = dirichlet_sum(&spec, &s, prec).unwrap();
    assert!(mp::rel_err(&a, &b) < 2f64.powi(-96));
}

#[test]
fn precision_is_stable() {
    let f = CMForm::new(HeckeChar::from_spec(&CharSpec::unramified(-7, 3)).unwrap());
    let s = c(2.0, 0.0, 256);
    let lo = completed_l(&calibrate(&LSeriesSpec::form(f.clone()), 128).unwrap(), &s, 128).unwrap().value;
    let hi = completed_l(&calibrate(&LSeriesSpec::form(f), 256).unwrap(), &s, 256).unwrap().value;
    assert!(mp::rel_err(&lo, &hi) < 2f64.powi(-120));
}
