use std::f64::consts::PI;

use wingmass::eigen::{
    aligned_spacing, assemble, eigenvalue_count, solve_window, weyl_count, Parity, SolveOptions,
};
use wingmass::geometry::DomainProfile;
use wingmass::par::Execution;
use wingmass::separable::{solve_modes, ModeProblem};

#[test]
fn weyl_law_on_the_stadium() {
    let p = DomainProfile::stadium(1.0);
    let op = assemble(&p, aligned_spacing(0.02, PI).unwrap(), Execution::default()).unwrap();
    for lambda in [10.0, 12.0] {
        let n = eigenvalue_count(&op, lambda * lambda, Execution::default()).unwrap() as f64;
        let ratio = n / weyl_count(p.area(), 0.0, lambda);
        assert!(
            (0.8..=1.2).contains(&ratio),
            "lambda = {lambda}: ratio {ratio}"
        );
    }
}

fn lowest_five(h: f64) -> Vec<f64> {
    let p = DomainProfile::stadium(1.0);
    let op = assemble(&p, aligned_spacing(h, PI).unwrap(), Execution::default()).unwrap();
    let sol = solve_window(&op, 0.0, 1.6, 5, &SolveOptions::default()).unwrap();
    assert!(sol.count >= 5);
    sol.pairs.iter().map(|q| q.lambda_sq).collect()
}

#[test]
fn second_order_grid_convergence() {
    let levels: Vec<Vec<f64>> = [0.1, 0.05, 0.025].iter().map(|&h| lowest_five(h)).collect();
    let rows = levels[0].iter().zip(&levels[1]).zip(&levels[2]);
    for (m, ((&a, &b), &c)) in rows.enumerate().take(5) {
        let d1 = (a - b).abs() / c;
        let d2 = (b - c).abs() / c;
        assert!(
            d1 <= 4.0 * 1.5 * d2 && d1 >= 4.0 / 1.5 * d2,
            "mode {m}: {d1:e} vs {d2:e}"
        );
    }
}

#[test]
fn parity_and_orthonormality() {
    let p = DomainProfile::stadium(1.0);
    let op = assemble(&p, aligned_spacing(0.05, PI).unwrap(), Execution::default()).unwrap();
    let sol = solve_window(&op, 3.0, 4.5, 500, &SolveOptions::default()).unwrap();
    let g = &op.grid;
    let h2 = g.h * g.h;
    for q in &sol.pairs {
        let sy = if q.sector.y == Parity::Even {
            1.0
        } else {
            -1.0
        };
        let sx = match q.sector.x {
            Some(Parity::Odd) => -1.0,
            _ => 1.0,
        };
        for &k in &g.interior_nodes {
            let (li, lj) = g.lattice(k);
            let v = q.field.values[k];
            assert!((q.field.values[g.full_index(li, -lj).unwrap()] - sy * v).abs() < 1e-6);
            assert!((q.field.values[g.full_index(-li, lj).unwrap()] - sx * v).abs() < 1e-6);
        }
    }
    for (i, a) in sol.pairs.iter().enumerate() {
        for (j, b) in sol.pairs.iter().enumerate() {
            let dot: f64 = a
                .field
                .values
                .iter()
                .zip(&b.field.values)
                .map(|(x, y)| x * y)
                .sum::<f64>()
                * h2;
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((dot - target).abs() <= 1e-8, "gram[{i}][{j}] = {dot}");
        }
    }
}

#[test]
fn flat_rectangle_is_a_tensor_sum_of_one_dimensional_spectra() {
    let a = PI / 2.0;
    let m = 160;
    let h = PI / m as f64;
    let p = DomainProfile::rectangle(a).unwrap();
    let op = assemble(&p, h, Execution::default()).unwrap();
    let sol = solve_window(&op, 0.0, 4.0, 500, &SolveOptions::default()).unwrap();
    let mut predicted = Vec::new();
    for n in 1..=8u32 {
        let prob = ModeProblem::on_interval(n, &p, -a, a).unwrap();
        let transverse = 4.0 / (h * h) * (n as f64 * h / 4.0).sin().powi(2);
        for mode in solve_modes(&prob, h, 8).unwrap() {
            let v = mode.lambda_sq - (n * n) as f64 / 4.0 + transverse;
            if v < 16.0 {
                predicted.push(v);
            }
        }
    }
    predicted.sort_by(f64::total_cmp);
    assert_eq!(predicted.len(), sol.pairs.len());
    for (q, e) in sol.pairs.iter().zip(&predicted) {
        assert!(
            (q.lambda_sq - e).abs() <= 1e-6 * e,
            "{} vs {e}",
            q.lambda_sq
        );
    }
}
