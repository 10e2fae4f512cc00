//! Random bounded programs checked against exhaustive vertex enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphsep::lp::{solve, LinearProgram, LpOutcome, Relation, SolverOptions};

struct Plane {
    coeffs: Vec<f64>,
    rhs: f64,
}

fn random_program(rng: &mut ChaCha8Rng, infeasible: bool) -> LinearProgram {
    let n = rng.random_range(1..=6);
    let m = rng.random_range(0..=8);
    let objective: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let mut lp = LinearProgram::maximize(objective);
    let mut x0 = Vec::with_capacity(n);
    for j in 0..n {
        let l = rng.random_range(-3.0..0.5);
        let u = l + rng.random_range(0.5..4.0);
        lp.set_bounds(j, l, u);
        x0.push(rng.random_range(l..u));
    }
    for _ in 0..m {
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let at: f64 = a.iter().zip(&x0).map(|(p, q)| p * q).sum();
        match rng.random_range(0..8) {
            0 => lp.add_constraint(a, Relation::Eq, at),
            1..=3 => lp.add_constraint(a, Relation::Ge, at - rng.random_range(0.0..1.0)),
            _ => lp.add_constraint(a, Relation::Le, at + rng.random_range(0.0..1.0)),
        };
    }
    if infeasible {
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        lp.add_constraint(a.clone(), Relation::Le, 0.0);
        lp.add_constraint(a, Relation::Ge, 0.5);
    }
    lp
}

fn planes(lp: &LinearProgram) -> Vec<Plane> {
    let n = lp.num_vars();
    let mut out: Vec<Plane> = lp
        .constraints()
        .iter()
        .map(|c| Plane {
            coeffs: c.coeffs.clone(),
            rhs: c.rhs,
        })
        .collect();
    for j in 0..n {
        let (l, u) = lp.bounds(j);
        for b in [l, u] {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            out.push(Plane { coeffs: e, rhs: b });
        }
    }
    out
}

/// Solves the square system by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            for k in col..n {
                a[i][k] -= f * a[col][k];
            }
            b[i] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn subsets(total: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in start..total {
        if total - i < k - cur.len() {
            break;
        }
        cur.push(i);
        subsets(total, k, i + 1, cur, f);
        cur.pop();
    }
}

/// Best objective over all feasible vertices, or `None` when there are none.
fn enumerate_vertices(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars();
    let planes = planes(lp);
    let mut best: Option<f64> = None;
    subsets(planes.len(), n, 0, &mut Vec::new(), &mut |idx| {
        let a = idx.iter().map(|&i| planes[i].coeffs.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].rhs).collect();
        let Some(x) = solve_square(a, b) else { return };
        if lp.max_violation(&x) > 1e-9 {
            return;
        }
        let v = lp.evaluate(&x);
        best = Some(best.map_or(v, |b: f64| b.max(v)));
    });
    best
}

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = SolverOptions::default();
    let mut optimal = 0;
    for case in 0..60 {
        let lp = random_program(&mut rng, case % 6 == 5);
        let oracle = enumerate_vertices(&lp);
        match (solve(&lp, &opts).unwrap(), oracle) {
            (LpOutcome::Optimal { solution, objective }, Some(best)) => {
                assert!(lp.max_violation(&solution) <= 1e-9, "case {case}: infeasible optimum");
                assert!((objective - best).abs() <= 1e-8, "case {case}: simplex {objective} vs oracle {best}");
                optimal += 1;
            }
            (LpOutcome::Infeasible { .. }, None) => {}
            (got, want) => panic!("case {case}: simplex {got:?} vs oracle {want:?}"),
        }
    }
    assert!(optimal >= 50, "only {optimal} feasible programs");
}

#[test]
fn reruns_are_bit_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let opts = SolverOptions::default();
    for _ in 0..50 {
        let lp = random_program(&mut rng, false);
        assert_eq!(solve(&lp, &opts).unwrap(), solve(&lp, &opts).unwrap());
    }
}
