//! Known disagreements between the derivations this tool reproduces and what
//! the computations show, with the convention adopted for each.

use serde::Serialize;

pub const LEDGER_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub id: &'static str,
    pub version: u32,
    pub claim: &'static str,
    pub finding: &'static str,
    pub resolution: &'static str,
}

pub const COMMUTATOR_DIAGONAL: &str = "commutator-diagonal-embedding";
pub const BLOWUP_DIRECTION: &str = "blowup-limit-direction";
pub const DILATION_CONVENTION: &str = "central-dilation-convention";
pub const JACKSON_AT_ZERO: &str = "jackson-derivative-at-zero";

pub const ENTRIES: [LedgerEntry; 4] = [
    LedgerEntry {
        id: COMMUTATOR_DIAGONAL,
        version: 1,
        claim: "for s(x) the unitriangular matrix with all off-diagonal entries x, the commutator of s(x) and s(y) has corner entry -2xy",
        finding: "s(x)s(y) has corner x+y+xy, symmetric in x and y, so s(x) and s(y) commute and the commutator is the identity; a dense 3x3 multiply agrees",
        resolution: "commutator returns the computed value; verify-all asserts the identity and records that the claimed corner is nonzero",
    },
    LedgerEntry {
        id: BLOWUP_DIRECTION,
        version: 1,
        claim: "the Pansu derivative is stated as a limit t -> infinity in its general definition and as t -> 0 in the worked examples",
        finding: "only the t -> 0 limit reproduces the worked diagonal and identity examples",
        resolution: "blow-up quotients are evaluated on scales t_k = 2^-k -> 0 and Richardson-extrapolated",
    },
    LedgerEntry {
        id: DILATION_CONVENTION,
        version: 1,
        claim: "the group dilation scales the central coordinate by t^2, while the worked blow-up quotient scales all three entries by t",
        finding: "under the graded dilation the central entry of the identity map's derivative is 0; under the linear scaling it is 1",
        resolution: "both conventions are available; source_graded is the default and source_linear reproduces the worked quotient",
    },
    LedgerEntry {
        id: JACKSON_AT_ZERO,
        version: 1,
        claim: "entries of the Pansu derivative at the identity are identified with Jackson derivatives of the component function at 0",
        finding: "the Jackson quotient (f(tx)-f(x))/(tx-x) is undefined at x = 0",
        resolution: "the blow-up quotient and the Jackson profile away from 0 are reported side by side; no equality at 0 is asserted",
    },
];

pub fn entry(id: &str) -> Option<&'static LedgerEntry> {
    ENTRIES.iter().find(|e| e.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_found() {
        for e in &ENTRIES {
            assert_eq!(entry(e.id), Some(e));
            assert_eq!(ENTRIES.iter().filter(|f| f.id == e.id).count(), 1);
        }
        assert!(entry("nope").is_none());
    }
}
