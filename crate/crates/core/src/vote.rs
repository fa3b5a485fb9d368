//! Unweighted majority voting over binary labels.
//!
//! Ties resolve to [`Label::Zero`]; committees of even size are common
//! (ten members is the usual setting) so the rule matters for reproducibility.

use crate::domain::Label;
use crate::error::{Error, Result};

/// `#votes for 1 - #votes for 0`.
pub fn vote_margin<I>(votes: I) -> Result<i64>
where
    I: IntoIterator<Item = Label>,
{
    let mut seen = false;
    let margin = votes.into_iter().fold(0i64, |acc, v| {
        seen = true;
        match v {
            Label::One => acc + 1,
            Label::Zero => acc - 1,
        }
    });
    if seen {
        Ok(margin)
    } else {
        Err(Error::EmptyCommittee)
    }
}

/// Label with strictly more votes; label 0 on a tie.
pub fn majority_vote<I>(votes: I) -> Result<Label>
where
    I: IntoIterator<Item = Label>,
{
    vote_margin(votes).map(|m| Label::from_bool(m > 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{One, Zero};

    #[test]
    fn examples() {
        assert_eq!(majority_vote([One, One, Zero]).unwrap(), One);
        assert_eq!(majority_vote([Zero]).unwrap(), Zero);
        assert_eq!(majority_vote([Zero, One]).unwrap(), Zero);
        assert_eq!(vote_margin([One, One, Zero]).unwrap(), 1);
        assert_eq!(vote_margin([Zero, Zero]).unwrap(), -2);
        assert_eq!(vote_margin([Zero, One]).unwrap(), 0);
    }

    #[test]
    fn empty_committee() {
        assert!(matches!(majority_vote([]), Err(Error::EmptyCommittee)));
        assert!(matches!(vote_margin(Vec::new()), Err(Error::EmptyCommittee)));
    }

    proptest::proptest! {
        #[test]
        fn permutation_invariant(mut bits in proptest::collection::vec(proptest::bool::ANY, 1..12),
                                 rot in 0usize..12) {
            let votes: Vec<Label> = bits.iter().map(|&b| Label::from_bool(b)).collect();
            let before = majority_vote(votes.iter().copied()).unwrap();
            let len = bits.len();
            bits.rotate_left(rot % len);
            bits.reverse();
            let after = majority_vote(bits.iter().map(|&b| Label::from_bool(b))).unwrap();
            proptest::prop_assert_eq!(before, after);
        }

        #[test]
        fn vote_agrees_with_margin(bits in proptest::collection::vec(proptest::bool::ANY, 1..12)) {
            let votes: Vec<Label> = bits.iter().map(|&b| Label::from_bool(b)).collect();
            let margin = vote_margin(votes.iter().copied()).unwrap();
            let vote = majority_vote(votes).unwrap();
            proptest::prop_assert_eq!(vote == One, margin > 0);
        }
    }
}
