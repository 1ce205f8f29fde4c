use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::enumerate::{ideals_equivalent, shortest_vector, unit_group};
use crate::localorder::unit_index;
use crate::numthy::{factor, is_prime, rat, Rat};
use crate::quat::{conj, QuatLattice, QuatOrder, RightIdeal};
use crate::spinor::{spinor_class_group, spinor_class_of_ideal, SpinorClass, SpinorClassGroup};
use crate::{Error, Result};

/// Default bound on the neighbor primes.
pub const DEFAULT_PRIMES_CAP: u64 = 50;

/// `mass(O) = prod_{p | disc D} (p - 1) / 24 * prod_p [O_max,p^x : O_p^x]`.
pub fn mass_target(order: &Arc<QuatOrder>) -> Result<Rat> {
    if !order.alg.is_definite() {
        return Err(Error::IndefiniteAlgebra);
    }
    let outer = Arc::new(order.maximal_overorder());
    let mut mass = Rat::new(1, 24);
    for p in order.alg.ram_primes() {
        mass *= rat(p as i128 - 1);
    }
    for (p, _) in factor(order.disc) {
        mass *= rat(unit_index(order, &outer, p)? as i128);
    }
    Ok(mass)
}

/// One right ideal class with its left order.
#[derive(Debug, Clone)]
pub struct ClassRep {
    pub ideal: RightIdeal,
    pub left: Arc<QuatOrder>,
    pub unit_size: usize,
    pub label: SpinorClass,
}

#[derive(Debug, Clone)]
pub struct ClassSet {
    pub order: Arc<QuatOrder>,
    pub group: SpinorClassGroup,
    pub reps: Vec<ClassRep>,
    pub mass_target: Rat,
    pub mass_achieved: Rat,
    pub primes: Vec<u64>,
}

impl ClassSet {
    pub fn class_number(&self) -> usize {
        self.reps.len()
    }

    pub fn unit_sizes(&self) -> Vec<usize> {
        self.reps.iter().map(|r| r.unit_size).collect()
    }

    pub fn summary(&self) -> ClassSetSummary {
        ClassSetSummary {
            class_number: self.class_number(),
            unit_sizes: self.unit_sizes(),
            spinor_labels: self.reps.iter().map(|r| r.label.clone()).collect(),
            mass_target: self.mass_target.to_string(),
            mass_achieved: self.mass_achieved.to_string(),
            neighbor_primes: self.primes.clone(),
            spinor_class_number: self.group.order(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassSetSummary {
    pub class_number: usize,
    pub unit_sizes: Vec<usize>,
    pub spinor_labels: Vec<SpinorClass>,
    pub mass_target: String,
    pub mass_achieved: String,
    pub neighbor_primes: Vec<u64>,
    pub spinor_class_number: usize,
}

/// An equivalent integral ideal of small norm: `conj(x) I / Nr(I)` for `x` of minimal
/// norm in `I`.
pub fn reduce_ideal(ideal: &RightIdeal) -> Result<RightIdeal> {
    let alg = &ideal.order.alg;
    let x = shortest_vector(alg, &ideal.lat)?.elem;
    let y = conj(&x).map(|c| c / ideal.nrd);
    ideal.left_mul(&y)
}

/// The `p + 1` ideals `J` of `I` with `Nr(J) = p Nr(I)`, for `p` coprime to `d(O)`.
///
/// Starting from one `x` whose norm is divisible by `p Nr(I)`, the neighbors are
/// `u x O + p I` with `u` ranging over units of `O_l(I) / p`; these realize every
/// line of the local `P^1(F_p)`.
pub fn neighbors(ideal: &RightIdeal, p: u64, rng: &mut ChaCha8Rng) -> Result<Vec<RightIdeal>> {
    let order = &ideal.order;
    let alg = &order.alg;
    let pq = rat(p as i128);
    let left = ideal.left_order();
    let scaled: Vec<[Rat; 4]> = ideal.lat.basis().iter().map(|b| b.map(|c| c * pq)).collect();
    let target = ideal.nrd * pq;
    let p_ideal = QuatLattice::from_generators(&scaled).expect("full rank");
    let random_vec = |rng: &mut ChaCha8Rng| -> [i128; 4] { std::array::from_fn(|_| rng.gen_range(0..p as i128)) };
    let mut x = None;
    for _ in 0..200 * p {
        let c = random_vec(rng);
        let e = ideal.lat.element(&c);
        if !p_ideal.contains(&e) && (alg.nrd(&e) / target).is_integer() {
            x = Some(e);
            break;
        }
    }
    let x = x.ok_or_else(|| Error::InvalidInput(format!("no zero divisor found modulo {p}")))?;
    let make = |y: &[Rat; 4]| -> Result<RightIdeal> {
        let mut gens = scaled.clone();
        gens.extend(order.basis().iter().map(|b| alg.mul(y, b)));
        RightIdeal::new(QuatLattice::from_generators(&gens).expect("full rank"), order.clone())
    };
    let mut found: BTreeSet<QuatLattice> = BTreeSet::new();
    let mut out = Vec::new();
    let first = make(&x)?;
    found.insert(first.lat.clone());
    out.push(first);
    let want = p as usize + 1;
    let mut tries = 0u64;
    while out.len() < want {
        tries += 1;
        if tries > 400 * (p + 10) {
            return Err(Error::InvalidInput(format!("neighbor search at {p} stalled at {} of {want}", out.len())));
        }
        let u = left.elem(&random_vec(rng));
        if (alg.nrd(&u) / pq).is_integer() {
            continue;
        }
        let j = make(&alg.mul(&u, &x))?;
        if found.insert(j.lat.clone()) {
            out.push(j);
        }
    }
    Ok(out)
}

fn prime_class(group: &SpinorClassGroup, p: u64) -> SpinorClass {
    use crate::numthy::{Place, SquareClass};
    let w: Vec<SquareClass> = group.primes.iter().map(|&q| SquareClass::of_int(p as i128, Place::Prime(q))).collect();
    group.class_of(&w)
}

fn generated(group: &SpinorClassGroup, gens: &[SpinorClass]) -> usize {
    let mut seen: BTreeSet<SpinorClass> = BTreeSet::from([group.identity()]);
    let mut stack = vec![group.identity()];
    while let Some(c) = stack.pop() {
        for g in gens {
            let d = group.mul(&c, g);
            if seen.insert(d.clone()) {
                stack.push(d);
            }
        }
    }
    seen.len()
}

/// Neighbor primes coprime to `d(O)` (hence split in `D`), in increasing order.
fn candidate_primes(order: &QuatOrder, cap: u64) -> Vec<u64> {
    (2..=cap).filter(|&p| is_prime(p) && order.disc % p as i128 != 0).collect()
}

/// Right ideal classes of a definite order by breadth-first neighbor search.
///
/// The prime set starts with the shortest prefix whose classes generate `SCl(O)`
/// and grows when the search is exhausted; the search stops exactly when
/// `sum 1/|O_l(I)^x|` reaches the mass.
pub fn class_set(order: &Arc<QuatOrder>, primes_cap: u64, seed: u64) -> Result<ClassSet> {
    let target = mass_target(order)?;
    let group = spinor_class_group(order);
    let candidates = candidate_primes(order, primes_cap);
    let mut active = 0;
    let full = group.order();
    while active < candidates.len() {
        active += 1;
        let gens: Vec<SpinorClass> = candidates[..active].iter().map(|&p| prime_class(&group, p)).collect();
        if generated(&group, &gens) == full {
            break;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = ClassSet {
        order: order.clone(),
        group,
        reps: Vec::new(),
        mass_target: target,
        mass_achieved: Rat::zero(),
        primes: Vec::new(),
    };
    set.admit(order.unit_ideal())?;
    // next[i]: reps below this index have been expanded at candidates[i]
    let mut next: Vec<usize> = vec![0; candidates.len()];
    while set.mass_achieved < target {
        let pending = (0..active).find(|&i| next[i] < set.reps.len());
        let Some(i) = pending else {
            if active == candidates.len() {
                return Err(Error::MassShortfall {
                    achieved: set.mass_achieved.to_string(),
                    target: target.to_string(),
                });
            }
            active += 1;
            continue;
        };
        let ideal = set.reps[next[i]].ideal.clone();
        next[i] += 1;
        for j in neighbors(&ideal, candidates[i], &mut rng)? {
            set.admit(j)?;
            if set.mass_achieved >= target {
                break;
            }
        }
    }
    if set.mass_achieved > target {
        return Err(Error::Mismatch(format!("mass exceeded: {} > {}", set.mass_achieved, target)));
    }
    set.primes = candidates[..active.min(candidates.len())].to_vec();
    Ok(set)
}

impl ClassSet {
    /// Adds the class of `ideal` unless already present.
    fn admit(&mut self, ideal: RightIdeal) -> Result<bool> {
        let ideal = reduce_ideal(&ideal)?;
        let label = spinor_class_of_ideal(&ideal, &self.group)?;
        let left = Arc::new(ideal.left_order());
        let unit_size = unit_group(&left)?.order();
        for r in &self.reps {
            if r.label == label && r.unit_size == unit_size && ideals_equivalent(&r.ideal, &ideal)? {
                return Ok(false);
            }
        }
        self.mass_achieved += Rat::new(1, unit_size as i128);
        self.reps.push(ClassRep { ideal, left, unit_size, label });
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{eichler_order, generate_order, RatQuatAlgebra};

    fn maximal(a: i128, b: i128, d: u64) -> Arc<QuatOrder> {
        Arc::new(eichler_order(Arc::new(RatQuatAlgebra::new(a, b)), 1, d).unwrap())
    }

    #[test]
    fn maximal_orders() {
        let s2 = class_set(&maximal(-1, -1, 2), DEFAULT_PRIMES_CAP, 1).unwrap();
        assert_eq!((s2.class_number(), s2.mass_achieved), (1, Rat::new(1, 24)));
        let s11 = class_set(&maximal(-1, -11, 11), DEFAULT_PRIMES_CAP, 1).unwrap();
        assert_eq!(s11.class_number(), 2);
        assert_eq!(s11.mass_achieved, Rat::new(10, 24));
        let mut sizes = s11.unit_sizes();
        sizes.sort();
        assert_eq!(sizes, vec![4, 6]);
    }

    #[test]
    fn eichler_mass() {
        // prod (p - 1) / 24 times N prod_{q | N} (1 + 1/q)
        let alg = Arc::new(RatQuatAlgebra::new(-1, -3));
        for (level, factor) in [(2u64, 3i128), (4, 6), (5, 6)] {
            let o = Arc::new(eichler_order(alg.clone(), level, 3).unwrap());
            assert_eq!(mass_target(&o).unwrap(), Rat::new(2 * factor, 24));
            let set = class_set(&o, DEFAULT_PRIMES_CAP, 7).unwrap();
            assert_eq!(set.mass_achieved, set.mass_target);
        }
    }

    #[test]
    fn suborder_labels_and_conjugation() {
        let h = maximal(-1, -1, 2);
        let gens: Vec<_> = h.basis().iter().map(|x| x.map(|c| c * rat(3))).collect();
        let o = Arc::new(generate_order(h.alg.clone(), &gens).unwrap());
        let set = class_set(&o, DEFAULT_PRIMES_CAP, 3).unwrap();
        let labels: BTreeSet<SpinorClass> = set.reps.iter().map(|r| r.label.clone()).collect();
        assert_eq!(labels.len(), 2);
        let mut sizes = set.unit_sizes();
        sizes.sort();
        for x in [[1, 1, 0, 0], [2, 1, 1, 0], [1, 2, 3, 1]] {
            let c = Arc::new(o.conjugate_by(&x.map(rat)).unwrap());
            let other = class_set(&c, DEFAULT_PRIMES_CAP, 5).unwrap();
            let mut s = other.unit_sizes();
            s.sort();
            assert_eq!(s, sizes);
        }
    }
}
