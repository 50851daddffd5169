use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

/// A two-slot schedule: a partition of the UE indices `0..U` into two
/// equal-size slots. Indices are 0-based in memory and 1-based when printed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    slot1: Vec<usize>,
    slot2: Vec<usize>,
}

impl Schedule {
    pub fn new(mut slot1: Vec<usize>, mut slot2: Vec<usize>) -> Result<Self> {
        slot1.sort_unstable();
        slot2.sort_unstable();
        let u = slot1.len() + slot2.len();
        if slot1.len() != slot2.len() {
            return Err(Error::InvalidSchedule(format!(
                "slots have {} and {} UEs",
                slot1.len(),
                slot2.len()
            )));
        }
        if u == 0 {
            return Err(Error::InvalidSchedule("empty schedule".into()));
        }
        let mut seen = vec![false; u];
        for &i in slot1.iter().chain(&slot2) {
            if i >= u {
                return Err(Error::InvalidSchedule(format!("UE index {} out of range 1..={u}", i + 1)));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidSchedule(format!("UE {} appears twice", i + 1)));
            }
        }
        Ok(Schedule { slot1, slot2 })
    }

    /// Schedule whose first slot is `slot1` and second slot the remaining UEs.
    pub fn from_slot1(slot1: &[usize], u_count: usize) -> Result<Self> {
        let mut in1 = vec![false; u_count];
        for &i in slot1 {
            if i >= u_count {
                return Err(Error::InvalidSchedule(format!("UE index {} out of range 1..={u_count}", i + 1)));
            }
            in1[i] = true;
        }
        let slot2 = (0..u_count).filter(|&i| !in1[i]).collect();
        Schedule::new(slot1.to_vec(), slot2)
    }

    pub fn slot1(&self) -> &[usize] {
        &self.slot1
    }

    pub fn slot2(&self) -> &[usize] {
        &self.slot2
    }

    pub fn slots(&self) -> [&[usize]; 2] {
        [&self.slot1, &self.slot2]
    }

    pub fn ue_count(&self) -> usize {
        self.slot1.len() * 2
    }

    pub fn swapped(&self) -> Schedule {
        Schedule {
            slot1: self.slot2.clone(),
            slot2: self.slot1.clone(),
        }
    }

    /// Same partition with slot order normalized so UE 1 is in the first slot.
    pub fn canonical(&self) -> Schedule {
        if self.slot1.first() == Some(&0) {
            self.clone()
        } else {
            self.swapped()
        }
    }

    pub fn same_partition(&self, other: &Schedule) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
        write!(f, "slot1={};slot2={}", join(&self.slot1), join(&self.slot2))
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSchedule(format!("cannot parse `{s}`"));
        let (a, b) = s.trim().split_once(';').ok_or_else(bad)?;
        let parse = |part: &str, key: &str| -> Result<Vec<usize>> {
            let list = part.strip_prefix(key).ok_or_else(bad)?;
            list.split(',')
                .map(|t| match t.trim().parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(bad()),
                })
                .collect()
        };
        Schedule::new(parse(a, "slot1=")?, parse(b, "slot2=")?)
    }
}

/// Number of slot-1 subsets, `C(U, U/2)`.
pub fn partition_count(u_count: usize) -> Result<u128> {
    if !u_count.is_multiple_of(2) {
        return Err(Error::OddUeCount(u_count));
    }
    let k = (u_count / 2) as u128;
    let n = u_count as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = c
            .checked_mul(n - i)
            .ok_or_else(|| Error::InvalidParameter(format!("C({u_count}, {}) overflows", k)))?
            / (i + 1);
    }
    Ok(c)
}

/// Uniformly random schedule: slot 1 is a uniform `U/2`-subset.
pub fn random_schedule<R: Rng + ?Sized>(u_count: usize, rng: &mut R) -> Result<Schedule> {
    if !u_count.is_multiple_of(2) {
        return Err(Error::OddUeCount(u_count));
    }
    if u_count == 0 {
        return Err(Error::InvalidSchedule("U must be at least 2".into()));
    }
    let slot1 = index::sample(rng, u_count, u_count / 2).into_vec();
    Schedule::from_slot1(&slot1, u_count)
}

/// Exchange the lowest-SINR UE of each slot (ties go to the lowest index).
pub fn worst_ue_swap(s: &Schedule, per_ue_sinr: &[f64]) -> Schedule {
    let worst = |slot: &[usize]| {
        slot.iter()
            .copied()
            .min_by(|&a, &b| per_ue_sinr[a].total_cmp(&per_ue_sinr[b]).then(a.cmp(&b)))
            .expect("slots are non-empty")
    };
    let (w1, w2) = (worst(&s.slot1), worst(&s.slot2));
    let mut slot1: Vec<usize> = s.slot1.iter().map(|&i| if i == w1 { w2 } else { i }).collect();
    let mut slot2: Vec<usize> = s.slot2.iter().map(|&i| if i == w2 { w1 } else { i }).collect();
    slot1.sort_unstable();
    slot2.sort_unstable();
    Schedule { slot1, slot2 }
}

/// All slot-1 subsets of size `U/2` in lexicographic order.
pub(crate) fn lexicographic_subsets(u_count: usize) -> Vec<Vec<usize>> {
    let k = u_count / 2;
    let mut out = Vec::new();
    let mut comb: Vec<usize> = (0..k).collect();
    loop {
        out.push(comb.clone());
        let Some(i) = (0..k).rev().find(|&i| comb[i] != i + u_count - k) else {
            return out;
        };
        comb[i] += 1;
        for j in i + 1..k {
            comb[j] = comb[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{Seed, Stream};
    use proptest::prelude::*;

    fn sched(a: &[usize], b: &[usize]) -> Schedule {
        // 1-based helper
        Schedule::new(a.iter().map(|i| i - 1).collect(), b.iter().map(|i| i - 1).collect()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Schedule::new(vec![0], vec![0]).is_err());
        assert!(Schedule::new(vec![0, 1], vec![2]).is_err());
        assert!(Schedule::new(vec![0, 5], vec![1, 2]).is_err());
        assert!(Schedule::new(vec![], vec![]).is_err());
        let s = Schedule::new(vec![3, 0], vec![2, 1]).unwrap();
        assert_eq!(s.slot1(), &[0, 3]);
    }

    #[test]
    fn display_and_parse() {
        let s = sched(&[1, 3], &[2, 4]);
        assert_eq!(s.to_string(), "slot1=1,3;slot2=2,4");
        assert_eq!("slot1=1,3;slot2=2,4".parse::<Schedule>().unwrap(), s);
        assert!("slot1=1,1;slot2=2,4".parse::<Schedule>().is_err());
        assert!("slot1=0,1;slot2=2,3".parse::<Schedule>().is_err());
        assert!("garbage".parse::<Schedule>().is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(partition_count(16).unwrap(), 12_870);
        assert_eq!(partition_count(2).unwrap(), 2);
        assert_eq!(partition_count(4).unwrap(), 6);
        assert!(matches!(partition_count(5), Err(Error::OddUeCount(5))));
        for u in [2, 4, 6, 8, 10] {
            assert_eq!(lexicographic_subsets(u).len() as u128, partition_count(u).unwrap());
        }
        let subsets = lexicographic_subsets(4);
        assert_eq!(subsets, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn random_u2_has_two_outcomes() {
        let mut rng = Seed(3).rng();
        for _ in 0..20 {
            let s = random_schedule(2, &mut rng).unwrap();
            assert!(s == sched(&[1], &[2]) || s == sched(&[2], &[1]));
        }
        assert!(random_schedule(3, &mut rng).is_err());
    }

    #[test]
    fn random_replays() {
        let a = random_schedule(16, &mut Seed(5).derive(Stream::Scheduling, 1).rng()).unwrap();
        let b = random_schedule(16, &mut Seed(5).derive(Stream::Scheduling, 1).rng()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_is_uniform_over_subsets() {
        let n = 100_000;
        let mut rng = Seed(17).rng();
        let subsets = lexicographic_subsets(4);
        let mut hits = vec![0u32; subsets.len()];
        for _ in 0..n {
            let s = random_schedule(4, &mut rng).unwrap();
            hits[subsets.iter().position(|x| x.as_slice() == s.slot1()).unwrap()] += 1;
        }
        let p = 1.0 / 6.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for h in hits {
            assert!((h as f64 - n as f64 * p).abs() <= 3.0 * sigma, "{h}");
        }
    }

    #[test]
    fn swap_examples() {
        let s = sched(&[1, 2, 3], &[4, 5, 6]);
        let sinr = [5.0, 1.0, 4.0, 6.0, 0.5, 3.0];
        let t = worst_ue_swap(&s, &sinr);
        assert_eq!(t, sched(&[1, 3, 5], &[2, 4, 6]));
        // Same ranking again swaps the pair back.
        assert_eq!(worst_ue_swap(&t, &sinr), s);
        // All equal: lowest index of each slot.
        let t = worst_ue_swap(&s, &[1.0; 6]);
        assert_eq!(t, sched(&[2, 3, 4], &[1, 5, 6]));
    }

    proptest! {
        #[test]
        fn random_and_swap_are_partitions(half in 1usize..9, seed in any::<u64>(), sinr in proptest::collection::vec(0.01f64..100.0, 16)) {
            let u = 2 * half;
            let s = random_schedule(u, &mut Seed(seed).rng()).unwrap();
            prop_assert!(Schedule::new(s.slot1().to_vec(), s.slot2().to_vec()).is_ok());
            let t = worst_ue_swap(&s, &sinr[..u]);
            prop_assert!(Schedule::new(t.slot1().to_vec(), t.slot2().to_vec()).is_ok());
            prop_assert_eq!(t.to_string().parse::<Schedule>().unwrap(), t);
        }
    }
}
