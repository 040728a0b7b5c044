//! Dense two-phase primal simplex with Bland's rule, sized for the small
//! linear programs left after fixing the binaries of a model.

use super::model::Sense;

const PIVOT_EPS: f64 = 1e-9;
const FEAS_EPS: f64 = 1e-9;

/// `maximize c.x` subject to rows and `lower <= x <= upper`.
/// Lower bounds must be finite.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Sense, f64)>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    m: usize,
    width: usize,
    cells: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, pr: usize, pc: usize, obj: &mut [f64]) {
        let w = self.width;
        let piv = self.at(pr, pc);
        for c in 0..w {
            self.cells[pr * w + c] /= piv;
        }
        let (before, rest) = self.cells.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for (a, &b) in row.iter_mut().zip(prow.iter()) {
                    *a -= f * b;
                }
            }
        }
        let f = obj[pc];
        if f != 0.0 {
            for (a, &b) in obj.iter_mut().zip(prow.iter()) {
                *a -= f * b;
            }
        }
        self.basis[pr] = pc;
    }

    /// Reduced-cost row `c_B B^-1 A - c` with the objective value in the
    /// last cell.
    fn objective_row(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj: Vec<f64> = (0..self.width)
            .map(|c| if c < cost.len() { -cost[c] } else { 0.0 })
            .collect();
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.cells[r * self.width..(r + 1) * self.width];
                for (o, &a) in obj.iter_mut().zip(row) {
                    *o += cb * a;
                }
            }
        }
        obj
    }

    /// Maximizes `cost` over the current basis. Returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        let mut obj = self.objective_row(cost);
        loop {
            let Some(pc) = (0..allowed).find(|&c| obj[c] < -PIVOT_EPS) else {
                return true;
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.m {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r) / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bb)) => {
                            ratio < br - 1e-12 || (ratio <= br + 1e-12 && self.basis[r] < bb)
                        }
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, pr, _)) = best else {
                return false;
            };
            self.pivot(pr, pc, &mut obj);
        }
    }
}

/// Solves `lp` exactly up to floating point tolerances.
pub fn solve_lp(lp: &LinearProgram) -> LpOutcome {
    let nv = lp.objective.len();
    assert!(lp.lower.iter().all(|l| l.is_finite()), "lower bounds must be finite");

    // Shift x = lower + z and turn finite upper bounds into rows.
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::with_capacity(lp.rows.len() + nv);
    for (a, s, b) in &lp.rows {
        let shift: f64 = a.iter().zip(&lp.lower).map(|(a, l)| a * l).sum();
        rows.push((a.clone(), *s, b - shift));
    }
    for k in 0..nv {
        if lp.upper[k].is_finite() {
            let mut a = vec![0.0; nv];
            a[k] = 1.0;
            rows.push((a, Sense::Le, lp.upper[k] - lp.lower[k]));
        }
    }
    for (a, s, b) in rows.iter_mut() {
        if *b < 0.0 {
            a.iter_mut().for_each(|v| *v = -*v);
            *b = -*b;
            *s = match *s {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let art0 = nv + n_slack;
    let width = art0 + n_art + 1;
    let mut t = Tableau {
        m,
        width,
        cells: vec![0.0; m * width],
        basis: vec![0; m],
    };
    let (mut slack, mut art) = (nv, art0);
    for (r, (a, s, b)) in rows.iter().enumerate() {
        t.cells[r * width..r * width + nv].copy_from_slice(a);
        t.cells[r * width + width - 1] = *b;
        match s {
            Sense::Le => {
                t.cells[r * width + slack] = 1.0;
                t.basis[r] = slack;
                slack += 1;
            }
            Sense::Ge => {
                t.cells[r * width + slack] = -1.0;
                slack += 1;
                t.cells[r * width + art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
            Sense::Eq => {
                t.cells[r * width + art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
        }
    }

    if n_art > 0 {
        let mut cost = vec![0.0; width - 1];
        cost[art0..].iter_mut().for_each(|c| *c = -1.0);
        t.optimize(&cost, width - 1);
        let infeasibility: f64 = (0..m)
            .filter(|&r| t.basis[r] >= art0)
            .map(|r| t.rhs(r))
            .sum();
        if infeasibility > FEAS_EPS {
            return LpOutcome::Infeasible;
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        let mut scratch = vec![0.0; width];
        for r in 0..m {
            if t.basis[r] >= art0 {
                if let Some(c) = (0..art0).find(|&c| t.at(r, c).abs() > PIVOT_EPS) {
                    t.pivot(r, c, &mut scratch);
                }
            }
        }
    }

    let mut cost = vec![0.0; width - 1];
    cost[..nv].copy_from_slice(&lp.objective);
    if !t.optimize(&cost, art0) {
        return LpOutcome::Unbounded;
    }
    let mut x = lp.lower.clone();
    for r in 0..m {
        if t.basis[r] < nv {
            x[t.basis[r]] += t.rhs(r);
        }
    }
    let objective = x.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
    LpOutcome::Optimal { x, objective }
}
