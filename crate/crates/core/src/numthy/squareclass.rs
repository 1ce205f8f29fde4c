use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

use super::arith::*;
use super::symbols::{hilbert_symbol_int, legendre, Place};

/// Least quadratic non-residue modulo an odd prime.
pub fn least_nonresidue(p: u64) -> i128 {
    (2..p as i128).find(|&a| legendre(a, p) == -1).expect("odd prime")
}

/// An element of Q_v^x / (Q_v^x)^2, stored by its canonical representative.
///
/// Representatives: `{1, u, p, u p}` for odd p (u the least non-residue),
/// `{1,3,5,7,2,6,10,14}` at 2 and `{1,-1}` at the real place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SquareClass {
    pub place: Place,
    pub rep: i64,
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

impl SquareClass {
    pub fn one(place: Place) -> Self {
        SquareClass { place, rep: 1 }
    }

    pub fn of_int(x: i128, place: Place) -> Self {
        assert!(x != 0, "square class of zero");
        match place {
            Place::Inf => SquareClass { place, rep: x.signum() as i64 },
            Place::Prime(2) => {
                let v = val(x, 2);
                let u = modp(x >> v, 8);
                SquareClass { place, rep: (u << (v % 2)) as i64 }
            }
            Place::Prime(p) => {
                let v = val(x, p);
                let u = x / pow(p, v);
                let e = if legendre(u, p) == 1 { 1 } else { least_nonresidue(p) };
                let rep = if v % 2 == 1 { e * p as i128 } else { e };
                SquareClass { place, rep: rep as i64 }
            }
        }
    }

    pub fn of_rat(x: &Rat, place: Place) -> Self {
        Self::of_int(*x.numer() * *x.denom(), place)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.place, other.place);
        Self::of_int(self.rep as i128 * other.rep as i128, self.place)
    }

    /// True when the class has even valuation (contains a unit).
    pub fn is_unit(&self) -> bool {
        match self.place {
            Place::Inf => true,
            Place::Prime(p) => self.rep as i128 % p as i128 != 0,
        }
    }

    pub fn all(place: Place) -> Vec<SquareClass> {
        let reps: Vec<i128> = match place {
            Place::Inf => vec![1, -1],
            Place::Prime(2) => vec![1, 3, 5, 7, 2, 6, 10, 14],
            Place::Prime(p) => {
                let u = least_nonresidue(p);
                vec![1, u, p as i128, u * p as i128]
            }
        };
        reps.into_iter().map(|r| Self::of_int(r, place)).collect()
    }

    pub fn units(place: Place) -> Vec<SquareClass> {
        Self::all(place).into_iter().filter(|c| c.is_unit()).collect()
    }
}

/// A subgroup of the square-class group at one place.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SquareClassSubgroup {
    pub place: Place,
    pub members: BTreeSet<SquareClass>,
}

impl SquareClassSubgroup {
    pub fn generated_by(place: Place, gens: impl IntoIterator<Item = SquareClass>) -> Self {
        let mut members: BTreeSet<SquareClass> = BTreeSet::new();
        members.insert(SquareClass::one(place));
        for g in gens {
            assert_eq!(g.place, place);
            if members.contains(&g) {
                continue;
            }
            let new: Vec<_> = members.iter().map(|m| m.mul(&g)).collect();
            members.extend(new);
        }
        SquareClassSubgroup { place, members }
    }

    pub fn trivial(place: Place) -> Self {
        Self::generated_by(place, [])
    }

    pub fn full(place: Place) -> Self {
        Self::generated_by(place, SquareClass::all(place))
    }

    pub fn units(place: Place) -> Self {
        Self::generated_by(place, SquareClass::units(place))
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, c: &SquareClass) -> bool {
        self.members.contains(c)
    }

    pub fn is_subgroup_of(&self, other: &Self) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Product subgroup `H K`.
    pub fn join(&self, other: &Self) -> Self {
        Self::generated_by(self.place, self.members.iter().chain(other.members.iter()).copied())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self::generated_by(self.place, self.members.intersection(&other.members).copied())
    }

    pub fn index_in_full(&self) -> usize {
        SquareClass::all(self.place).len() / self.order()
    }

    pub fn is_full(&self) -> bool {
        self.index_in_full() == 1
    }

    pub fn unit_part(&self) -> Self {
        Self::generated_by(self.place, self.members.iter().filter(|c| c.is_unit()).copied())
    }

    pub fn has_odd_valuation(&self) -> bool {
        self.members.iter().any(|c| !c.is_unit())
    }

    pub fn reps(&self) -> Vec<i64> {
        self.members.iter().map(|c| c.rep).collect()
    }
}

/// Norms from K = Q(sqrt m) at p, modulo squares: `{c : (m, c)_p = 1}`.
pub fn local_norm_group(m: i128, p: u64) -> SquareClassSubgroup {
    let place = Place::Prime(p);
    SquareClassSubgroup::generated_by(
        place,
        SquareClass::all(place)
            .into_iter()
            .filter(|c| hilbert_symbol_int(m, c.rep as i128, place) == 1),
    )
}
