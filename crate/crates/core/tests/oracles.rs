use casimir_shear::green::Cavity;
use casimir_shear::linalg::rel_deviation;
use casimir_shear::oracle::{
    comoving_oracle, interface_matching_oracle, pde_residual, series_green, static_bvp_green,
};
use casimir_shear::reflection::{fresnel_plate1, fresnel_plate2};
use casimir_shear::stress::C_LIGHT;
use casimir_shear::verify::{gold_drude, gold_plasma, silicon_lorentz};
use casimir_shear::{Error, Material, Mode, Response};

const SCALE: f64 = C_LIGHT / 1e-7;

fn materials() -> Vec<Material> {
    vec![
        gold_drude(),
        gold_plasma(),
        silicon_lorentz(),
        Material::constant(3.0),
        Material {
            electric: Response::Constant { value: 2.5 },
            magnetic: Response::Drude {
                omega_p: 5e15,
                gamma: 1e14,
            },
        },
    ]
}

#[test]
fn fresnel_matches_interface_matching() {
    for m in materials() {
        for (k, u, v, beta) in [(0.3, 0.7, -0.4, 0.0), (1.5, -2.0, 1.1, 0.6), (4.0, 0.2, 3.0, 0.9)] {
            let mode = Mode::new(k, u, v, beta).unwrap();
            let f1 = fresnel_plate1(&m, &mode, SCALE).unwrap();
            let (te, tm) = interface_matching_oracle(&m, &mode, SCALE).unwrap();
            assert!((f1.r_e - te).norm() < 1e-12 && (f1.r_b - tm).norm() < 1e-12);
            let f2 = fresnel_plate2(&m, &mode, SCALE).unwrap();
            let (te, tm) = comoving_oracle(&m, &mode, SCALE).unwrap();
            assert!((f2.r_e - te).norm() < 1e-12 && (f2.r_b - tm).norm() < 1e-12);
        }
    }
}

#[test]
fn bvp_agrees_with_closed_form_at_rest() {
    let pairs = [
        (gold_drude(), Material::constant(2.0)),
        (silicon_lorentz(), gold_plasma()),
        (Material::constant(4.0), Material::constant(1.5)),
    ];
    for (p1, p2) in pairs {
        for (k, u, v) in [(0.5, 0.8, 0.3), (2.0, -1.0, 1.5)] {
            let mode = Mode::new(k, u, v, 0.0).unwrap();
            let cav = Cavity::new(&mode, &p1, &p2, 1.0, SCALE).unwrap();
            for (x, xp) in [(0.3, 0.6), (0.7, 0.2)] {
                let g = cav.green_direct(x, xp, false).unwrap();
                let b = static_bvp_green(x, xp, &mode, &p1, &p2, 1.0, SCALE).unwrap();
                let d = rel_deviation(&g.matrix, &b.matrix);
                assert!(d < 1e-8, "deviation {d}");
            }
        }
    }
}

#[test]
fn bvp_refuses_motion() {
    let mode = Mode::new(1.0, 0.5, 0.5, 0.3).unwrap();
    let m = Material::constant(2.0);
    assert_eq!(
        static_bvp_green(0.3, 0.6, &mode, &m, &m, 1.0, SCALE).unwrap_err(),
        Error::InvalidBeta(0.3)
    );
}

#[test]
fn series_converges_to_direct_form() {
    let (p1, p2) = (Material::constant(3.0), gold_drude());
    let mode = Mode::new(0.8, 1.2, -0.6, 0.5).unwrap();
    let cav = Cavity::new(&mode, &p1, &p2, 1.0, SCALE).unwrap();
    let g = cav.green_direct(0.25, 0.65, true).unwrap();
    let mut last = f64::INFINITY;
    for n in [2, 8, 32] {
        let s = series_green(0.25, 0.65, &mode, &p1, &p2, 1.0, SCALE, n, true).unwrap();
        let d = rel_deviation(&g.matrix, &s.matrix);
        assert!(d < last);
        last = d;
    }
    assert!(last < 1e-10, "{last}");
}

#[test]
fn moving_green_tensor_solves_the_wave_equation() {
    let (p1, p2) = (gold_drude(), Material::constant(2.0));
    let mode = Mode::new(1.1, 0.7, -0.9, 0.6).unwrap();
    let cav = Cavity::new(&mode, &p1, &p2, 1.0, SCALE).unwrap();
    let g = |x: f64| cav.green_direct(x, 0.3, true).map(|b| b.matrix);
    let coarse = pde_residual(&g, 0.65, 0.3, &mode, 1.0, 0.02).unwrap();
    let fine = pde_residual(&g, 0.65, 0.3, &mode, 1.0, 0.01).unwrap();
    let order = (coarse / fine).log2();
    assert!((order - 2.0).abs() < 0.1, "order {order}");
    assert!(matches!(
        pde_residual(&g, 0.65, 0.3, &mode, 1.0, 0.2),
        Err(Error::StepTooLarge { .. })
    ));
}
