//! Two routes to the limiting covariance of a jointly exchangeable array,
//! computed exactly over finite latent supports.
//!
//! Route one builds the Hajek projection slot by slot: h_k(u) is the
//! conditional mean of the tuple (1,..,K) given the slot-k unit latent,
//! and Sigma = E[W W^T] with W = sum_k h_k(U). Route two symmetrizes the
//! cell over slot permutations and takes
//! Sigma_S = K^2 E[(Xcheck_{(1..K)} - mu)(Xcheck_{(1,K+1..2K)} - mu)^T].
//! The two expressions agree; the check enumerates both and reports the
//! largest entrywise gap.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hoeffding::LatentLaw;

type Generator<'a> = dyn Fn(&[usize]) -> Vec<f64> + Sync + 'a;

/// Finite-support jointly exchangeable generator. The generator receives
/// one latent value per nonzero axis mask e (index mask - 1); the value for
/// e is the latent attached to the *set* of units in e's slots, so two
/// tuples over the same unit set share those arguments.
pub struct JointOracleInstance<'a> {
    pub k: usize,
    pub p: usize,
    /// law shared by every unit-level latent U_i
    pub unit_law: LatentLaw,
    /// subset_laws[r - 2] is the law shared by every latent on unit sets of
    /// size r, r = 2..=K
    pub subset_laws: Vec<LatentLaw>,
    pub generator: Box<Generator<'a>>,
    pub budget: u64,
}

#[derive(Debug, Clone)]
pub struct SilvermanCheck {
    pub p: usize,
    /// Hajek-projection route, row-major p x p
    pub sigma: Vec<f64>,
    /// symmetrized-cell route, row-major p x p
    pub sigma_s: Vec<f64>,
    pub max_abs_diff: f64,
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..k).collect();
    fn heap(n: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..n {
            heap(n - 1, items, out);
            if n % 2 == 0 {
                items.swap(i, n - 1);
            } else {
                items.swap(0, n - 1);
            }
        }
    }
    heap(k, &mut items, &mut out);
    out
}

fn for_each_assignment(laws: &[&LatentLaw], mut f: impl FnMut(&[usize], f64)) {
    let m = laws.len();
    let mut a = vec![0usize; m];
    loop {
        let mut prob = 1.0;
        for (i, law) in laws.iter().enumerate() {
            prob *= law.probs[a[i]];
        }
        f(&a, prob);
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

fn check_budget(laws: &[&LatentLaw], budget: u64) -> Result<()> {
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

/// Evaluate the generator for a tuple of units given a lookup from unit
/// sets to latent values.
fn eval_tuple(
    k: usize,
    gen: &Generator<'_>,
    units: &[usize],
    singleton: impl Fn(usize) -> usize,
    set_value: &HashMap<Vec<usize>, usize>,
) -> Vec<f64> {
    let masks = (1usize << k) - 1;
    let mut args = vec![0usize; masks];
    for e in 1..=masks {
        if e.count_ones() == 1 {
            let slot = e.trailing_zeros() as usize;
            args[e - 1] = singleton(units[slot]);
        } else {
            let mut set: Vec<usize> = (0..k).filter(|&s| e & (1 << s) != 0).map(|s| units[s]).collect();
            set.sort_unstable();
            args[e - 1] = set_value[&set];
        }
    }
    gen(&args)
}

/// Enumerate both covariance expressions and their largest entrywise gap.
pub fn silverman_covariance_check(inst: &JointOracleInstance<'_>) -> Result<SilvermanCheck> {
    let (k, p) = (inst.k, inst.p);
    if k < 2 {
        return Err(Error::InvalidParam("need K >= 2".into()));
    }
    if inst.subset_laws.len() != k - 1 {
        return Err(Error::InvalidParam(format!(
            "need {} subset laws for K = {}",
            k - 1,
            k
        )));
    }
    let masks = (1usize << k) - 1;

    // ---- grand mean and route one: h_k via the single tuple (0..K) ----
    // latents: one per mask of the tuple
    let tuple_laws: Vec<&LatentLaw> = (1..=masks)
        .map(|e| {
            let ones = e.count_ones() as usize;
            if ones == 1 {
                &inst.unit_law
            } else {
                &inst.subset_laws[ones - 2]
            }
        })
        .collect();
    check_budget(&tuple_laws, inst.budget)?;

    let mu = {
        let mut mean = vec![0.0; p];
        for_each_assignment(&tuple_laws, |a, prob| {
            let x = (inst.generator)(a);
            for (m, v) in mean.iter_mut().zip(&x) {
                *m += prob * v;
            }
        });
        mean
    };

    let m_unit = inst.unit_law.support();
    // h[k][u] = E[X | slot-k unit latent = u], centered by mu
    let mut h = vec![vec![0.0; m_unit * p]; k];
    let mut h_den = vec![vec![0.0; m_unit]; k];
    for_each_assignment(&tuple_laws, |a, prob| {
        let x = (inst.generator)(a);
        for slot in 0..k {
            let mask = 1usize << slot;
            let u = a[mask - 1];
            for j in 0..p {
                h[slot][u * p + j] += prob * x[j];
            }
            h_den[slot][u] += prob;
        }
    });
    for slot in 0..k {
        for u in 0..m_unit {
            let d = h_den[slot][u];
            for j in 0..p {
                let v = if d > 0.0 { h[slot][u * p + j] / d } else { 0.0 };
                h[slot][u * p + j] = v - mu[j];
            }
        }
    }
    let mut sigma = vec![0.0; p * p];
    for u in 0..m_unit {
        let w: Vec<f64> = (0..p)
            .map(|j| (0..k).map(|slot| h[slot][u * p + j]).sum::<f64>())
            .collect();
        let prob = inst.unit_law.probs[u];
        for r in 0..p {
            for c in 0..p {
                sigma[r * p + c] += prob * w[r] * w[c];
            }
        }
    }

    // ---- route two: direct enumeration over the latents of the tuples
    // (0..K) and (0, K..2K-1), which share exactly unit 0 ----
    let units_a: Vec<usize> = (0..k).collect();
    let units_b: Vec<usize> = std::iter::once(0).chain(k..(2 * k - 1)).collect();
    let all_units: Vec<usize> = (0..(2 * k - 1)).collect();

    let mut sets: Vec<Vec<usize>> = Vec::new();
    for units in [&units_a, &units_b] {
        for e in 1..=masks {
            if e.count_ones() >= 2 {
                let mut set: Vec<usize> = (0..k)
                    .filter(|&s| e & (1 << s) != 0)
                    .map(|s| units[s])
                    .collect();
                set.sort_unstable();
                if !sets.contains(&set) {
                    sets.push(set);
                }
            }
        }
    }
    // latent order: singletons for all units, then the subset latents
    let mut laws: Vec<&LatentLaw> = all_units.iter().map(|_| &inst.unit_law).collect();
    for set in &sets {
        laws.push(&inst.subset_laws[set.len() - 2]);
    }
    check_budget(&laws, inst.budget)?;

    let perms = permutations(k);
    let kfact = perms.len() as f64;
    let mut sigma_s = vec![0.0; p * p];
    for_each_assignment(&laws, |a, prob| {
        let set_value: HashMap<Vec<usize>, usize> = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), a[all_units.len() + i]))
            .collect();
        let mut xa = vec![0.0; p];
        let mut xb = vec![0.0; p];
        for perm in &perms {
            let ua: Vec<usize> = perm.iter().map(|&s| units_a[s]).collect();
            let ub: Vec<usize> = perm.iter().map(|&s| units_b[s]).collect();
            let va = eval_tuple(k, &inst.generator, &ua, |unit| a[unit], &set_value);
            let vb = eval_tuple(k, &inst.generator, &ub, |unit| a[unit], &set_value);
            for j in 0..p {
                xa[j] += va[j] / kfact;
                xb[j] += vb[j] / kfact;
            }
        }
        let kk = (k * k) as f64;
        for r in 0..p {
            for c in 0..p {
                sigma_s[r * p + c] += kk * prob * (xa[r] - mu[r]) * (xb[c] - mu[c]);
            }
        }
    });

    let max_abs_diff = sigma
        .iter()
        .zip(&sigma_s)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(SilvermanCheck {
        p,
        sigma,
        sigma_s,
        max_abs_diff,
    })
}
