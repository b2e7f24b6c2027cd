//! Exact check of the shell identity `Σ_i 2^-i |∂S_i| = 1`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::tree::{MonotoneTree, ShellProfile};

/// Nonnegative dyadic rational `numer / 2^exp`, kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numer: BigUint,
    exp: u32,
}

impl Dyadic {
    pub fn new(numer: impl Into<BigUint>, exp: u32) -> Self {
        let mut d = Self { numer: numer.into(), exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.numer.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.numer.trailing_zeros().unwrap_or(0).min(self.exp as u64) as u32;
        self.numer >>= tz;
        self.exp -= tz;
    }

    pub fn numer(&self) -> &BigUint {
        &self.numer
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        let a = self.numer << (exp - self.exp);
        let b = rhs.numer << (exp - rhs.exp);
        Dyadic::new(a + b, exp)
    }
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Self { numer: BigUint::zero(), exp: 0 }
    }

    fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Self { numer: BigUint::one(), exp: 0 }
    }
}

impl std::ops::Mul for Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(self.numer * rhs.numer, self.exp + rhs.exp)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        (&self.numer << (exp - self.exp)).cmp(&(&other.numer << (exp - other.exp)))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/2^{}", self.numer, self.exp)
        }
    }
}

/// Number types that can represent `count / 2^exp`.
pub trait ShellScalar: Zero + Add<Output = Self> + Clone {
    fn scaled_count(count: u64, exp: u32) -> Self;
}

impl ShellScalar for Dyadic {
    fn scaled_count(count: u64, exp: u32) -> Self {
        Dyadic::new(count, exp)
    }
}

impl ShellScalar for BigRational {
    fn scaled_count(count: u64, exp: u32) -> Self {
        BigRational::new(BigInt::from(count), BigInt::one() << exp as usize)
    }
}

impl ShellScalar for f64 {
    fn scaled_count(count: u64, exp: u32) -> Self {
        count as f64 * (-(exp as f64)).exp2()
    }
}

impl ShellScalar for f32 {
    fn scaled_count(count: u64, exp: u32) -> Self {
        count as f32 * (-(exp as f32)).exp2()
    }
}

/// `Σ_i 2^-i |∂S_i|` in the chosen number type.
pub fn shell_sum<S: ShellScalar>(profile: &ShellProfile) -> S {
    profile
        .counts
        .iter()
        .fold(S::zero(), |acc, (&level, &count)| acc + S::scaled_count(count, level))
}

/// The shell identity in exact dyadic arithmetic.
pub fn shell_identity_check(tree: &MonotoneTree) -> bool {
    shell_sum::<Dyadic>(&tree.shell_profile()) == Dyadic::one()
}

/// Result of an exhaustive identity sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum ShellSweep {
    Pass { max_edges: usize, trees: u64 },
    Counterexample { tree: MonotoneTree, sum: Dyadic },
}

impl fmt::Display for ShellSweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShellSweep::Pass { max_edges, trees } => write!(f, "LEMMA22 PASS k={max_edges} trees={trees}"),
            ShellSweep::Counterexample { tree, sum } => {
                write!(f, "LEMMA22 FAIL sum={sum} edges=")?;
                let edges: Vec<String> = tree.edges().iter().map(|e| e.to_string()).collect();
                write!(f, "{}", edges.join(";"))
            }
        }
    }
}

/// Checks every monotone tree with at most `max_edges` edges.
pub fn sweep_shell_identity(max_edges: usize) -> crate::Result<ShellSweep> {
    let mut trees = 0u64;
    for tree in super::tree::enumerate_monotone_trees(max_edges)? {
        let sum = shell_sum::<Dyadic>(&tree.shell_profile());
        if sum != Dyadic::one() {
            return Ok(ShellSweep::Counterexample { tree, sum });
        }
        trees += 1;
    }
    Ok(ShellSweep::Pass { max_edges, trees })
}
