mod common;

use proptest::prelude::*;

use common::*;
use wgfem::assembly::{assemble, AssemblyOptions};
use wgfem::expr::Expr;
use wgfem::mesh::{uniform_box3d, uniform_rectangular, uniform_triangular, Domain2, Mesh};
use wgfem::postprocess::{error_norms, fit_rate, project_exact};
use wgfem::problem::{constant, scalar, Coefficients, ProblemSpec};
use wgfem::solver::{bicgstab, cg, dense_lu, relative_residual, SolverConfig};
use wgfem::sparse::CsrMatrix;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: cases(),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn kernel_is_the_constants_on_triangles(cell in triangle()) {
        check_kernel_rank(&cell)?;
    }

    #[test]
    fn kernel_is_the_constants_on_rectangles(cell in tensor_cell(2)) {
        check_kernel_rank(&cell)?;
    }

    #[test]
    fn kernel_is_the_constants_on_boxes(cell in tensor_cell(3)) {
        check_kernel_rank(&cell)?;
    }

    #[test]
    fn projection_commutes_on_triangles(cell in triangle()) {
        check_projection_commutes(&cell)?;
    }

    #[test]
    fn projection_commutes_on_rectangles(cell in tensor_cell(2)) {
        check_projection_commutes(&cell)?;
    }

    #[test]
    fn projection_commutes_on_boxes(cell in tensor_cell(3)) {
        check_projection_commutes(&cell)?;
    }

    #[test]
    fn closed_forms_match_quadrature_on_triangles(cell in triangle()) {
        check_closed_forms(&cell)?;
    }

    #[test]
    fn closed_forms_match_quadrature_on_rectangles(cell in tensor_cell(2)) {
        check_closed_forms(&cell)?;
    }

    #[test]
    fn closed_forms_match_quadrature_on_boxes(cell in tensor_cell(3)) {
        check_closed_forms(&cell)?;
    }

    #[test]
    fn closed_poisson_blocks_match_quadrature(cell in triangle()) {
        check_poisson_blocks(&cell)?;
    }

    #[test]
    fn triangle_bases_give_the_same_stiffness(cell in triangle()) {
        check_approaches_agree(&cell)?;
    }

    #[test]
    fn stiffness_is_the_bilinear_form_on_triangles(cell in triangle()) {
        check_bilinear_form(&cell)?;
    }

    #[test]
    fn stiffness_is_the_bilinear_form_on_rectangles(cell in tensor_cell(2)) {
        check_bilinear_form(&cell)?;
    }

    #[test]
    fn stiffness_is_the_bilinear_form_on_boxes(cell in tensor_cell(3)) {
        check_bilinear_form(&cell)?;
    }

    #[test]
    fn diffusion_stiffness_is_semidefinite(cell in prop_oneof![triangle(), tensor_cell(2), tensor_cell(3)]) {
        check_semidefinite(&cell)?;
    }

    #[test]
    fn rate_fit_is_exact_for_power_laws(c in 1e-3f64..1e3, p in 0.1f64..3.0, levels in 2usize..7) {
        let h: Vec<f64> = (0..levels).map(|i| 0.5f64.powi(i as i32 + 1)).collect();
        let err: Vec<f64> = h.iter().map(|h| c * h.powf(p)).collect();
        let r = fit_rate(&h, &err).unwrap();
        prop_assert!((r - p).abs() <= 1e-12, "fitted {} for {}", r, p);
    }

    #[test]
    fn printed_expressions_parse_back(e in expr()) {
        let printed = e.to_string();
        let back = Expr::parse(&printed).unwrap();
        prop_assert_eq!(back.to_string(), printed);
        let p = [0.3, 0.7, 0.2];
        let (a, b) = (e.eval(&p), back.eval(&p));
        prop_assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
    }
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0f64..100.0).prop_map(Expr::Num),
        prop::sample::select(vec!["x", "y", "z", "r", "theta"])
            .prop_map(|v| Expr::parse(v).unwrap()),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone(), 0usize..5).prop_map(|(a, b, op)| {
                let op = ["+", "-", "*", "/", "^"][op];
                Expr::parse(&format!("({a}) {op} ({b})")).unwrap()
            }),
            (
                inner.clone(),
                prop::sample::select(vec!["sin", "cos", "exp", "sqrt", "abs"])
            )
                .prop_map(|(a, f)| Expr::parse(&format!("{f}({a})")).unwrap()),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Atan2(Box::new(a), Box::new(b))),
        ]
    })
}

fn small_mesh(kind: usize, n: usize) -> Mesh {
    match kind {
        0 => uniform_triangular(n, Domain2::UNIT).unwrap(),
        1 => uniform_rectangular(n, n + 1, Domain2::UNIT).unwrap(),
        _ => uniform_box3d(n).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..config() })]

    #[test]
    fn constants_are_reproduced(
        kind in 0usize..3,
        n in 1usize..4,
        c in -5.0f64..5.0,
        beta in prop::array::uniform3(-2.0f64..2.0),
        gamma in 0.0f64..3.0,
    ) {
        let mesh = small_mesh(kind, n);
        let coefficients = Coefficients {
            beta: Some(std::sync::Arc::new(move |_: &[f64; 3]| beta)),
            gamma: Some(constant(gamma)),
            ..Coefficients::poisson(constant(gamma * c))
        };
        let problem = ProblemSpec::dirichlet_everywhere(coefficients, constant(c));
        let system = assemble(&mesh, &problem, &AssemblyOptions::default()).unwrap();
        if system.rhs.is_empty() {
            return Ok(());
        }
        let (x, _) = dense_lu(&system.matrix, &system.rhs, &SolverConfig::default()).unwrap();
        let uh = system.expand(&x);
        for v in uh.u0.iter().chain(&uh.ub) {
            prop_assert!((v - c).abs() <= 1e-10 * c.abs().max(1.0), "{} instead of {}", v, c);
        }
    }

    #[test]
    fn error_norms_scale_with_the_error(
        kind in 0usize..3,
        s in -4.0f64..4.0,
        seed in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let mesh = small_mesh(kind, 2);
        let u = |p: &[f64; 3]| (p[0] + 2.0 * p[1]).sin() + p[2];
        let grad = |p: &[f64; 3]| {
            let c = (p[0] + 2.0 * p[1]).cos();
            [c, 2.0 * c, 1.0]
        };
        let problem = ProblemSpec::dirichlet_everywhere(
            Coefficients::poisson(constant(0.0)),
            scalar(u),
        );
        let opts = AssemblyOptions::default();
        let system = assemble(&mesh, &problem, &opts).unwrap();
        let rules = rules();
        let q = project_exact(&u, &mesh, &rules);
        let perturb = |scale: f64| {
            let mut v = q.clone();
            let mut it = seed.iter().cycle();
            for x in v.u0.iter_mut().chain(v.ub.iter_mut()) {
                *x += scale * it.next().unwrap();
            }
            v
        };
        let norms = |uh| error_norms(&mesh, &system.kernels, &uh, &u, &grad, &rules).unwrap();
        let exact = norms(q.clone());
        let one = norms(perturb(1.0));
        let scaled = norms(perturb(s));
        for m in [0, 1, 2, 5] {
            prop_assert!(exact.0[m] <= 1e-12);
            let expected = s.abs() * one.0[m];
            prop_assert!((scaled.0[m] - expected).abs() <= 1e-10 * expected.max(1e-300), "metric {}", m);
        }
        // Triangle inequality through the projection.
        prop_assert!(scaled.grad_error() <= scaled.grad_e() + exact.grad_error() + 1e-12);
    }

    #[test]
    fn solvers_agree_and_report_true_residuals(
        n in 2usize..40,
        entries in prop::collection::vec((0usize..40, 0usize..40, -1.0f64..1.0), 0..120),
        rhs in prop::collection::vec(-1.0f64..1.0, 40),
        symmetric in any::<bool>(),
    ) {
        let mut triplets = Vec::new();
        let mut row_sum = vec![0.0; n];
        for &(i, j, v) in &entries {
            let (i, j) = (i % n, j % n);
            if i == j {
                continue;
            }
            triplets.push((i, j, v));
            row_sum[i] += v.abs();
            if symmetric {
                triplets.push((j, i, v));
                row_sum[j] += v.abs();
            }
        }
        for (i, s) in row_sum.iter().enumerate() {
            triplets.push((i, i, s + 1.0));
        }
        let a = CsrMatrix::from_triplets(n, n, triplets);
        let b = &rhs[..n];
        if b.iter().all(|v| *v == 0.0) {
            return Ok(());
        }
        let cfg = SolverConfig::default().with_tol(1e-10);
        let (x_lu, _) = dense_lu(&a, b, &cfg).unwrap();
        let (x_it, report) = if symmetric { cg(&a, b, &cfg) } else { bicgstab(&a, b, &cfg) }.unwrap();
        prop_assert!((report.residual - relative_residual(&a, &x_it, b)).abs() <= 1e-14);
        prop_assert!(report.residual <= cfg.tol);
        let scale = x_lu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = x_lu.iter().zip(&x_it).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        prop_assert!(diff <= 10.0 * cfg.tol * scale.max(1.0) * n as f64);
    }
}
