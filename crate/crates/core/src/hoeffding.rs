//! Exact Hoeffding-type decomposition of a separately exchangeable cell by
//! enumeration over finite latent supports.
//!
//! A cell is X = g((U_e)_e) with one independent latent per nonempty axis
//! subset e of {1..K}. The component for e is defined recursively:
//! conditional mean given the latents in e's down-set minus the components
//! of all proper sub-subsets (and the grand mean). Subsets are encoded as
//! bitmasks, mask 1..2^K-1, bit k set when axis k is in e.

use crate::error::{Error, Result};

/// Marginal law of one latent over the finite support {0, .., probs.len()-1}.
#[derive(Debug, Clone)]
pub struct LatentLaw {
    pub probs: Vec<f64>,
}

impl LatentLaw {
    pub fn uniform(m: usize) -> Self {
        Self {
            probs: vec![1.0 / m as f64; m],
        }
    }

    pub fn support(&self) -> usize {
        self.probs.len()
    }
}

type Generator<'a> = dyn Fn(&[usize]) -> Vec<f64> + Sync + 'a;

/// Finite-support instance of the decomposition: one latent law per
/// nonzero mask, and a generator mapping a full latent assignment (indexed
/// by mask - 1) to a p-vector.
pub struct HoeffdingOracleInstance<'a> {
    pub k: usize,
    pub p: usize,
    /// laws[mask - 1] is the law of U_e for mask = 1..2^K-1
    pub laws: Vec<LatentLaw>,
    pub generator: Box<Generator<'a>>,
    pub budget: u64,
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// All components of the decomposition, as dense tables over the down-set
/// assignments.
#[derive(Debug, Clone)]
pub struct HoeffdingComponents {
    pub k: usize,
    pub p: usize,
    /// grand mean E[X]
    pub mean: Vec<f64>,
    /// per nonzero mask e (index mask - 1): the nonzero submasks of e in
    /// increasing order, and a table of shape prod(supports) x p indexed by
    /// mixed radix over those submasks' latent values
    pub tables: Vec<(Vec<usize>, Vec<f64>)>,
    supports: Vec<usize>,
}

impl HoeffdingComponents {
    /// Component value for mask `e` at a full latent assignment.
    pub fn eval(&self, e: usize, assignment: &[usize]) -> &[f64] {
        let (submasks, table) = &self.tables[e - 1];
        let mut idx = 0usize;
        for &s in submasks {
            idx = idx * self.supports[s - 1] + assignment[s - 1];
        }
        &table[idx * self.p..(idx + 1) * self.p]
    }
}

fn num_masks(k: usize) -> usize {
    (1usize << k) - 1
}

fn check_budget(laws: &[LatentLaw], budget: u64) -> Result<()> {
    let mut combos: u128 = 1;
    for law in laws {
        combos = combos.saturating_mul(law.support() as u128);
        if combos > budget as u128 {
            return Err(Error::SupportTooLarge {
                combinations: combos,
                budget,
            });
        }
    }
    Ok(())
}

/// Iterate all full assignments with their joint probabilities.
fn for_each_assignment(laws: &[LatentLaw], mut f: impl FnMut(&[usize], f64)) {
    let m = laws.len();
    let mut a = vec![0usize; m];
    loop {
        let mut prob = 1.0;
        for (i, law) in laws.iter().enumerate() {
            prob *= law.probs[a[i]];
        }
        f(&a, prob);
        // odometer
        let mut i = m;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            a[i] += 1;
            if a[i] < laws[i].support() {
                break;
            }
            a[i] = 0;
        }
    }
}

fn nonzero_submasks(e: usize) -> Vec<usize> {
    let mut subs = Vec::new();
    let mut s = e;
    loop {
        if s != 0 {
            subs.push(s);
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & e;
    }
    subs.sort_unstable();
    subs
}

fn radix_index(submasks: &[usize], supports: &[usize], assignment: &[usize]) -> usize {
    let mut idx = 0usize;
    for &s in submasks {
        idx = idx * supports[s - 1] + assignment[s - 1];
    }
    idx
}

/// Compute every component of the decomposition by exact enumeration.
pub fn hoeffding_oracle(inst: &HoeffdingOracleInstance<'_>) -> Result<HoeffdingComponents> {
    let masks = num_masks(inst.k);
    if inst.laws.len() != masks {
        return Err(Error::InvalidParam(format!(
            "need {} latent laws for K = {}, got {}",
            masks,
            inst.k,
            inst.laws.len()
        )));
    }
    check_budget(&inst.laws, inst.budget)?;
    let supports: Vec<usize> = inst.laws.iter().map(|l| l.support()).collect();
    let p = inst.p;

    // grand mean
    let mut mean = vec![0.0; p];
    for_each_assignment(&inst.laws, |a, prob| {
        let x = (inst.generator)(a);
        debug_assert_eq!(x.len(), p);
        for (m, v) in mean.iter_mut().zip(&x) {
            *m += prob * v;
        }
    });

    // conditional means E[X | (U_e')_{e' <= e}] per mask, then peel off
    // sub-components in increasing popcount order
    let mut tables: Vec<(Vec<usize>, Vec<f64>)> = Vec::with_capacity(masks);
    for e in 1..=masks {
        let submasks = nonzero_submasks(e);
        let size: usize = submasks.iter().map(|&s| supports[s - 1]).product();
        let mut num = vec![0.0; size * p];
        let mut den = vec![0.0; size];
        for_each_assignment(&inst.laws, |a, prob| {
            let idx = radix_index(&submasks, &supports, a);
            let x = (inst.generator)(a);
            for j in 0..p {
                num[idx * p + j] += prob * x[j];
            }
            den[idx] += prob;
        });
        for idx in 0..size {
            let d = den[idx];
            for j in 0..p {
                num[idx * p + j] = if d > 0.0 { num[idx * p + j] / d } else { 0.0 };
            }
        }
        tables.push((submasks, num));
    }
    let mut comps = HoeffdingComponents {
        k: inst.k,
        p,
        mean,
        tables,
        supports: supports.clone(),
    };
    // subtract, for each e, the grand mean and all proper sub-components;
    // do it via a scratch full-assignment pass so projections stay simple
    for e in 1..=masks {
        let (submasks, _) = comps.tables[e - 1].clone();
        let size: usize = submasks.iter().map(|&s| supports[s - 1]).product();
        let mut adjust = vec![0.0; size * p];
        let mut seen = vec![false; size];
        for_each_assignment(&inst.laws, |a, _| {
            let idx = radix_index(&submasks, &supports, a);
            if seen[idx] {
                return;
            }
            seen[idx] = true;
            let row = &mut adjust[idx * p..(idx + 1) * p];
            row.copy_from_slice(&comps.mean);
            for &s in &submasks {
                if s == e {
                    continue;
                }
                let sub = comps.eval(s, a);
                for j in 0..p {
                    row[j] += sub[j];
                }
            }
        });
        let table = &mut comps.tables[e - 1].1;
        for (t, adj) in table.iter_mut().zip(&adjust) {
            *t -= adj;
        }
    }
    Ok(comps)
}

/// Max reconstruction error max_assignment || mean + sum_e W_e - X ||_inf.
pub fn reconstruction_error(
    inst: &HoeffdingOracleInstance<'_>,
    comps: &HoeffdingComponents,
) -> f64 {
    let masks = num_masks(inst.k);
    let mut worst = 0.0f64;
    for_each_assignment(&inst.laws, |a, _| {
        let x = (inst.generator)(a);
        for j in 0..inst.p {
            let mut acc = comps.mean[j];
            for e in 1..=masks {
                acc += comps.eval(e, a)[j];
            }
            worst = worst.max((acc - x[j]).abs());
        }
    });
    worst
}

/// Max over e, l in supp(e), and assignments of the conditional mean of
/// W_e given the latents in the down-set of e - e_l. Zero in exact
/// arithmetic: every component is degenerate in each of its own axes.
pub fn max_degenerate_conditional_mean(
    inst: &HoeffdingOracleInstance<'_>,
    comps: &HoeffdingComponents,
) -> f64 {
    let masks = num_masks(inst.k);
    let supports: Vec<usize> = inst.laws.iter().map(|l| l.support()).collect();
    let mut worst = 0.0f64;
    for e in 1..=masks {
        for axis in 0..inst.k {
            if e & (1 << axis) == 0 {
                continue;
            }
            let reduced = e & !(1 << axis);
            let cond_masks = nonzero_submasks(reduced);
            let size: usize = cond_masks.iter().map(|&s| supports[s - 1]).product::<usize>().max(1);
            let mut num = vec![0.0; size * inst.p];
            let mut den = vec![0.0; size];
            for_each_assignment(&inst.laws, |a, prob| {
                let idx = radix_index(&cond_masks, &supports, a);
                let w = comps.eval(e, a);
                for j in 0..inst.p {
                    num[idx * inst.p + j] += prob * w[j];
                }
                den[idx] += prob;
            });
            for idx in 0..size {
                if den[idx] > 0.0 {
                    for j in 0..inst.p {
                        worst = worst.max((num[idx * inst.p + j] / den[idx]).abs());
                    }
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_uniform_laws(k: usize) -> Vec<LatentLaw> {
        (0..num_masks(k)).map(|_| LatentLaw::uniform(2)).collect()
    }

    #[test]
    fn constant_generator_has_zero_components() {
        let inst = HoeffdingOracleInstance {
            k: 2,
            p: 1,
            laws: binary_uniform_laws(2),
            generator: Box::new(|_| vec![3.5]),
            budget: DEFAULT_BUDGET,
        };
        let comps = hoeffding_oracle(&inst).unwrap();
        assert_eq!(comps.mean, vec![3.5]);
        for (_, table) in &comps.tables {
            assert!(table.iter().all(|&v| v.abs() <= 1e-15));
        }
    }

    #[test]
    fn additive_generator_k2_hand_case() {
        // g(u1, u2, u12) = u1 + u2 with binary uniform latents:
        // W_(1,0) = u1 - 1/2, W_(0,1) = u2 - 1/2, interaction 0
        let inst = HoeffdingOracleInstance {
            k: 2,
            p: 1,
            laws: binary_uniform_laws(2),
            generator: Box::new(|a| vec![a[0] as f64 + a[1] as f64]),
            budget: DEFAULT_BUDGET,
        };
        let comps = hoeffding_oracle(&inst).unwrap();
        assert!((comps.mean[0] - 1.0).abs() <= 1e-15);
        for u1 in 0..2usize {
            for u2 in 0..2usize {
                for u12 in 0..2usize {
                    let a = [u1, u2, u12];
                    assert!((comps.eval(0b01, &a)[0] - (u1 as f64 - 0.5)).abs() <= 1e-15);
                    assert!((comps.eval(0b10, &a)[0] - (u2 as f64 - 0.5)).abs() <= 1e-15);
                    assert!(comps.eval(0b11, &a)[0].abs() <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn multiplicative_generator_has_interaction() {
        let inst = HoeffdingOracleInstance {
            k: 2,
            p: 1,
            laws: binary_uniform_laws(2),
            generator: Box::new(|a| vec![a[0] as f64 * a[1] as f64]),
            budget: DEFAULT_BUDGET,
        };
        let comps = hoeffding_oracle(&inst).unwrap();
        let interaction_nonzero = (0..2).any(|u1| {
            (0..2).any(|u2| comps.eval(0b11, &[u1, u2, 0])[0].abs() > 1e-12)
        });
        assert!(interaction_nonzero);
        assert!(reconstruction_error(&inst, &comps) <= 1e-12);
        assert!(max_degenerate_conditional_mean(&inst, &comps) <= 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let inst = HoeffdingOracleInstance {
            k: 2,
            p: 1,
            laws: vec![
                LatentLaw::uniform(200),
                LatentLaw::uniform(200),
                LatentLaw::uniform(200),
            ],
            generator: Box::new(|_| vec![0.0]),
            budget: DEFAULT_BUDGET,
        };
        assert!(matches!(
            hoeffding_oracle(&inst).unwrap_err(),
            Error::SupportTooLarge { .. }
        ));
    }
}
