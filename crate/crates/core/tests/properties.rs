use proptest::prelude::*;
use tailgf::divdiff::finite_tail_sum;
use tailgf::limits::{koenigs, w_transform};
use tailgf::{f_implicit, f_ode, tail_gf, OffspringLaw, PsiKernel};

fn mlf() -> OffspringLaw {
    OffspringLaw::mlf(0.3, 0.1, 0.05, 0.4).unwrap()
}

/// Points in `[0, 2]`, inside the MLF radius `1/0.4`.
fn points(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..2.0f64, n)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// A finite law `p_0..p_d` with a defect, normalised.
fn finite_law() -> impl Strategy<Value = OffspringLaw> {
    (prop::collection::vec(0.0..1.0f64, 2..7), 0.0..0.3f64).prop_map(|(raw, defect)| {
        let total: f64 = raw.iter().sum::<f64>() + 1e-3;
        let mut p: Vec<f64> = raw
            .iter()
            .map(|x| (x + 1e-3 / raw.len() as f64) / total * (1.0 - defect))
            .collect();
        let drift = 1.0 - defect - p.iter().sum::<f64>();
        p[0] += drift;
        OffspringLaw::finite(p, defect).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric_in_its_arguments(mut pts in points(2..6), seed in any::<u64>()) {
        let law = mlf();
        let a = tail_gf(&law, &pts).unwrap();
        // A seeded rotation and reversal of the points.
        let k = (seed % pts.len() as u64) as usize;
        pts.rotate_left(k);
        if seed & 1 == 1 {
            pts.reverse();
        }
        let b = tail_gf(&law, &pts).unwrap();
        prop_assert!(close(a, b, 1e-12), "{a} vs {b}");
    }

    #[test]
    fn divided_difference_recursion(mut pts in points(3..6)) {
        pts.sort_by(f64::total_cmp);
        let spread = pts.windows(2).all(|w| w[1] - w[0] > 0.05);
        prop_assume!(spread);
        let law = mlf();
        let n = pts.len();
        let whole = tail_gf(&law, &pts).unwrap();
        let lo = tail_gf(&law, &pts[..n - 1]).unwrap();
        let hi = tail_gf(&law, &pts[1..]).unwrap();
        let rec = (hi - lo) / (pts[n - 1] - pts[0]);
        prop_assert!(close(whole, rec, 1e-8), "{whole} vs {rec}");
    }

    #[test]
    fn confluent_points_give_derivatives(x in 0.0..2.0f64) {
        let law = mlf();
        let d1 = tail_gf(&law, &[x, x]).unwrap();
        let d2 = tail_gf(&law, &[x, x, x]).unwrap();
        prop_assert!(close(d1, law.derivative(x, 1).unwrap(), 1e-12));
        prop_assert!(close(d2, law.derivative(x, 2).unwrap() / 2.0, 1e-12));
    }

    #[test]
    fn polynomial_laws(law in finite_law(), pts in prop::collection::vec(0.0..1.0f64, 1..9)) {
        let d = law.degree().unwrap();
        let p = law.coefficients(d + 1);
        let v = tail_gf(&law, &pts).unwrap();
        if pts.len() > d + 1 {
            prop_assert_eq!(v, 0.0);
        } else {
            let sum = finite_tail_sum(&p, &pts);
            prop_assert!(close(v, sum, 1e-12), "{v} vs {sum}");
        }
    }

    #[test]
    fn law_json_round_trip(law in finite_law()) {
        let back = OffspringLaw::from_json(&law.to_json()).unwrap();
        prop_assert_eq!(back, law);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semigroup(t in 0.0..4.0f64, u in 0.0..4.0f64, s in 0.0..0.95f64, which in 0usize..3) {
        let law = [
            OffspringLaw::finite(vec![0.4, 0.0, 0.4], 0.2).unwrap(),
            OffspringLaw::trifurcation(0.3, 0.3, 0.2).unwrap(),
            OffspringLaw::harris_yule(2).unwrap(),
        ][which].clone();
        let direct = f_ode(&law, t + u, s).unwrap().value;
        let inner = f_ode(&law, u, s).unwrap().value;
        let composed = f_ode(&law, t, inner).unwrap().value;
        prop_assert!((direct - composed).abs() < 1e-10, "{direct} vs {composed}");
    }

    #[test]
    fn implicit_route_agrees_off_grid(t in 0.0..10.0f64, s in 0.0..1.5f64) {
        let law = OffspringLaw::trifurcation(0.3, 0.3, 0.2).unwrap();
        let kernel = PsiKernel::new(&law).unwrap();
        prop_assume!(s < kernel.profile().r);
        let a = f_ode(&law, t, s).unwrap().value;
        let b = f_implicit(&kernel, t, s).unwrap().value;
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn koenigs_linearises(t in 0.0..10.0f64, s in 0.0..1.9f64) {
        let law = OffspringLaw::finite(vec![0.4, 0.0, 0.4], 0.2).unwrap();
        let kernel = PsiKernel::new(&law).unwrap();
        let alpha = kernel.profile().alpha;
        let ks = koenigs(&kernel, s).unwrap();
        let kf = koenigs(&kernel, f_ode(&law, t, s).unwrap().value).unwrap();
        prop_assert!((kf - (-alpha * t).exp() * ks).abs() < 1e-9 * ks.abs().max(1.0));
    }

    #[test]
    fn eta_is_decreasing_and_convex(rho in 0.01..20.0f64, cubic in any::<bool>()) {
        let law = if cubic {
            OffspringLaw::trifurcation(0.2, 0.5, 0.3).unwrap()
        } else {
            OffspringLaw::finite(vec![0.2, 0.0, 0.8], 0.0).unwrap()
        };
        let w = w_transform(&PsiKernel::new(&law).unwrap()).unwrap();
        let h = 0.05 * rho;
        let (a, b, c) = (w.eta(rho - h).unwrap(), w.eta(rho).unwrap(), w.eta(rho + h).unwrap());
        prop_assert!(a > b && b > c);
        prop_assert!(a + c - 2.0 * b > -1e-12);
        prop_assert!(b > w.q && b < 1.0);
    }
}
