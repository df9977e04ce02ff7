use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::fp::{is_prime, same_cyclic_modular_rep, FpMatrix};
use crate::error::{Error, Result};
use crate::zlinalg::{FinAbGroup, GroupElement, IntMatrix};

/// A finite abelian group `A` with an action of a cyclic group `H` of order
/// `h`, given by the image of a generator, and a prime `p` (the
/// characteristic of the coefficient field).
///
/// Column `j` of `action` holds the image of the `j`-th generator of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HModule {
    group: FinAbGroup,
    action: IntMatrix,
    h: u64,
    p: u64,
}

/// Product `a * b` of endomorphism matrices, entries of row `i` reduced mod `d_i`.
fn compose(group: &FinAbGroup, a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    reduce_rows(group, &a.mul(b))
}

fn reduce_rows(group: &FinAbGroup, m: &IntMatrix) -> IntMatrix {
    let mut out = m.clone();
    for (i, d) in group.invariant_factors().iter().enumerate() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j).mod_floor(d));
        }
    }
    out
}

impl HModule {
    pub fn new(group: FinAbGroup, action: IntMatrix, h: u64, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::input(format!("{p} is not a prime")));
        }
        if h == 0 {
            return Err(Error::input("the order of H must be positive"));
        }
        let k = group.rank();
        if action.rows() != k || action.cols() != k {
            return Err(Error::input(format!(
                "action must be a {k}x{k} matrix, got {}x{}",
                action.rows(),
                action.cols()
            )));
        }
        let d = group.invariant_factors();
        for i in 0..k {
            for j in 0..k {
                if !(action.get(i, j) * &d[j]).is_multiple_of(&d[i]) {
                    return Err(Error::input(format!(
                        "action entry ({i},{j}) does not define a homomorphism Z/{} -> Z/{}",
                        d[j], d[i]
                    )));
                }
            }
        }
        let module = HModule {
            action: reduce_rows(&group, &action),
            group,
            h,
            p,
        };
        let mut power = reduce_rows(&module.group, &IntMatrix::identity(k));
        for _ in 0..h {
            power = compose(&module.group, &power, &module.action);
        }
        if power != reduce_rows(&module.group, &IntMatrix::identity(k)) {
            return Err(Error::input(format!(
                "the action raised to the power {h} is not the identity"
            )));
        }
        Ok(HModule {
            action,
            ..module
        })
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn action(&self) -> &IntMatrix {
        &self.action
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn act(&self, x: &GroupElement) -> GroupElement {
        self.group.reduce(&self.action.mul_vec(x.coeffs()))
    }

    /// The induced action on `<gens>`, which must be an invariant subgroup.
    pub fn submodule(&self, gens: &[GroupElement]) -> Result<HModule> {
        let sub = self.group.subgroup(gens)?;
        let cols = (0..sub.group.rank())
            .map(|j| {
                sub.coords_of(&self.act(&sub.generator(j)))
                    .map(|c| c.coeffs().to_vec())
                    .ok_or_else(|| Error::input("subgroup is not invariant under the action"))
            })
            .collect::<Result<Vec<_>>>()?;
        HModule::new(sub.group.clone(), IntMatrix::from_columns(sub.group.rank(), &cols), self.h, self.p)
    }

    /// The induced action on `A / <gens>` for an invariant subgroup.
    pub fn quotient(&self, gens: &[GroupElement]) -> Result<HModule> {
        let q = self.group.quotient_presentation(gens)?;
        let cols: Vec<Vec<BigInt>> = (0..q.group.rank())
            .map(|j| {
                let lift = self.group.reduce(&q.lift(&q.group.basis(j)));
                q.project(self.act(&lift).coeffs()).coeffs().to_vec()
            })
            .collect();
        HModule::new(q.group.clone(), IntMatrix::from_columns(q.group.rank(), &cols), self.h, self.p)
    }
}

/// Actions of the generator of `H` on `Tor_0(F_p, A)` and `Tor_1(F_p, A)`,
/// both on the coordinates `i` with `p | d_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorPair {
    pub t0: FpMatrix,
    pub t1: FpMatrix,
    pub coordinates: Vec<usize>,
}

fn lift_relations(group: &FinAbGroup, gens_action: &IntMatrix) -> Result<IntMatrix> {
    let d = group.invariant_factors();
    let k = group.rank();
    let mut q = IntMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let (quot, rem) = (gens_action.get(i, j) * &d[j]).div_rem(&d[i]);
            if !rem.is_zero() {
                return Err(Error::input("no lift of the action to the relation lattice"));
            }
            q.set(i, j, quot);
        }
    }
    Ok(q)
}

fn restrict_mod_p(m: &IntMatrix, idx: &[usize], p: u64) -> FpMatrix {
    let pb = BigInt::from(p);
    FpMatrix::from_fn(idx.len(), p, |a, b| {
        m.get(idx[a], idx[b]).mod_floor(&pb).to_u64().expect("reduced below p")
    })
}

/// Lifts the action to the resolution `0 -> Z^k --diag(d)--> Z^k -> A -> 0`
/// as `(P, Q)` with `P diag(d) = diag(d) Q` and reduces both mod `p`.
pub fn tor_pair(module: &HModule) -> Result<TorPair> {
    let p = module.p;
    let pb = BigInt::from(p);
    let idx: Vec<usize> = (0..module.group.rank())
        .filter(|&i| module.group.invariant_factors()[i].is_multiple_of(&pb))
        .collect();
    let gens_action = &module.action;
    let rel_action = lift_relations(&module.group, gens_action)?;
    let t0 = restrict_mod_p(gens_action, &idx, p);
    let t1 = restrict_mod_p(&rel_action, &idx, p);

    // A second lift from differently chosen representatives must agree mod p.
    let other = reduce_rows(&module.group, gens_action);
    let other_rel = lift_relations(&module.group, &other)?;
    if restrict_mod_p(&other_rel, &idx, p) != t1 || restrict_mod_p(&other, &idx, p) != t0 {
        return Err(Error::invariant("Tor actions depend on the chosen lift"));
    }
    Ok(TorPair { t0, t1, coordinates: idx })
}

/// Why the cotangent class was certified trivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum K0Reason {
    /// `p` does not divide `|A|`: both Tor groups vanish.
    Vacuous,
    /// `p` does not divide `h`: the representation category is semisimple,
    /// so `A` splits into pieces with constant elementary divisors.
    TameOrder,
    /// Checked piece by piece on the filtration by `{a : order(a) < exponent}`.
    Filtration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationPiece {
    pub module: HModule,
    pub tor: TorPair,
    pub isomorphic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K0Certificate {
    pub trivial: bool,
    pub reason: K0Reason,
    pub pieces: Vec<FiltrationPiece>,
}

/// Successive graded pieces with constant elementary divisors: `A / A'`
/// followed by the pieces of `A'`, where `A' = {a : order(a) < exponent(A)}`.
pub fn constant_divisor_pieces(module: &HModule) -> Result<Vec<HModule>> {
    let factors = module.group.invariant_factors();
    if factors.is_empty() {
        return Ok(Vec::new());
    }
    if factors.iter().all(|d| d == &factors[0]) {
        return Ok(vec![module.clone()]);
    }
    let gens = module.group.subgroup_of_order_less_than(&module.group.exponent())?;
    let mut pieces = vec![module.quotient(&gens)?];
    pieces.extend(constant_divisor_pieces(&module.submodule(&gens)?)?);
    Ok(pieces)
}

/// Certifies that `Tor_0 - Tor_1` vanishes in the Grothendieck group of
/// `H`-representations, following the elementary-divisor filtration.
pub fn cotangent_class_trivial(module: &HModule) -> Result<K0Certificate> {
    let pb = BigInt::from(module.p);
    if !module.group.order().is_multiple_of(&pb) {
        return Ok(K0Certificate {
            trivial: true,
            reason: K0Reason::Vacuous,
            pieces: Vec::new(),
        });
    }
    let mut rest = module.group.order().clone();
    while rest.is_multiple_of(&pb) {
        rest /= &pb;
    }
    if rest != BigInt::from(1) {
        return Err(Error::input(format!(
            "{} is not a {}-group; split off the {}-part first",
            module.group, module.p, module.p
        )));
    }
    if module.h % module.p != 0 {
        return Ok(K0Certificate {
            trivial: true,
            reason: K0Reason::TameOrder,
            pieces: Vec::new(),
        });
    }
    let mut pieces = Vec::new();
    for piece in constant_divisor_pieces(module)? {
        let tor = tor_pair(&piece)?;
        let isomorphic = same_cyclic_modular_rep(&tor.t0, &tor.t1, piece.h)?;
        pieces.push(FiltrationPiece { module: piece, tor, isomorphic });
    }
    Ok(K0Certificate {
        trivial: pieces.iter().all(|p| p.isomorphic),
        reason: K0Reason::Filtration,
        pieces,
    })
}
