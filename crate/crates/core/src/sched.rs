//! Wake/sleep plans derived from a bitstream.
//!
//! Local approach: each node reads its own stream and is awake during slot
//! `[t_k, t_{k+1})` iff bit `k` is 1. Global approach: a central scheduler
//! cuts its stream into fixed-width blocks, each naming a node that must
//! toggle its state.

/// Per-node timeline. Slot `k` covers `[k·quantum, (k+1)·quantum)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WakePlan {
    pub node_id: usize,
    pub slots: Vec<bool>,
    pub quantum: f64,
}

impl WakePlan {
    pub fn horizon(&self) -> f64 {
        self.slots.len() as f64 * self.quantum
    }

    pub fn awake_slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().enumerate().filter(|(_, &a)| a).map(|(k, _)| k)
    }

    pub fn is_awake_at(&self, t: f64) -> bool {
        if t < 0.0 {
            return false;
        }
        let k = (t / self.quantum).floor() as usize;
        self.slots.get(k).copied().unwrap_or(false)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DutyCycle {
    pub fraction: f64,
    /// Set for an empty plan, where the fraction is reported as 0.
    pub undefined: bool,
}

pub fn local_schedule(node_id: usize, bits: &[bool], quantum: f64) -> WakePlan {
    assert!(quantum > 0.0, "quantum must be positive");
    WakePlan {
        node_id,
        slots: bits.to_vec(),
        quantum,
    }
}

pub fn duty_cycle(plan: &WakePlan) -> DutyCycle {
    if plan.slots.is_empty() {
        return DutyCycle {
            fraction: 0.0,
            undefined: true,
        };
    }
    let ones = plan.slots.iter().filter(|&&b| b).count();
    DutyCycle {
        fraction: ones as f64 / plan.slots.len() as f64,
        undefined: false,
    }
}

/// An order for `node_id` to flip its awake/asleep state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ToggleOrder {
    pub time_slot: usize,
    pub node_id: usize,
}

/// Bits per id block: `max(1, ceil(log2 num_nodes))`.
pub fn block_width(num_nodes: usize) -> usize {
    assert!(num_nodes >= 1, "need at least one node");
    let w = usize::BITS - (num_nodes - 1).leading_zeros();
    (w as usize).max(1)
}

/// Reads big-endian id blocks from a bit iterator, discarding ids that are
/// out of range. Stops at the first incomplete block.
pub struct ToggleDecoder<I> {
    bits: I,
    num_nodes: usize,
    width: usize,
    emitted: usize,
    rejected: usize,
}

impl<I: Iterator<Item = bool>> ToggleDecoder<I> {
    pub fn new(bits: I, num_nodes: usize) -> Self {
        Self {
            bits,
            num_nodes,
            width: block_width(num_nodes),
            emitted: 0,
            rejected: 0,
        }
    }

    pub fn rejected(&self) -> usize {
        self.rejected
    }

    /// Next accepted node id.
    pub fn next_id(&mut self) -> Option<usize> {
        loop {
            let mut v = 0usize;
            for _ in 0..self.width {
                v = (v << 1) | self.bits.next()? as usize;
            }
            // a single node is addressed by every one-bit block
            if self.num_nodes == 1 {
                return Some(0);
            }
            if v < self.num_nodes {
                return Some(v);
            }
            self.rejected += 1;
        }
    }
}

impl<I: Iterator<Item = bool>> Iterator for ToggleDecoder<I> {
    type Item = ToggleOrder;

    fn next(&mut self) -> Option<ToggleOrder> {
        let node_id = self.next_id()?;
        let order = ToggleOrder {
            time_slot: self.emitted,
            node_id,
        };
        self.emitted += 1;
        Some(order)
    }
}

/// Decodes a whole bitstream into toggle orders, one per time slot.
pub fn global_schedule(bits: &[bool], num_nodes: usize) -> Vec<ToggleOrder> {
    ToggleDecoder::new(bits.iter().copied(), num_nodes).collect()
}

/// Replays toggle orders from an all-awake start, returning each node's state
/// after every slot up to `slots`.
pub fn apply_toggles(orders: &[ToggleOrder], num_nodes: usize, slots: usize) -> Vec<Vec<bool>> {
    let mut state = vec![true; num_nodes];
    let mut out = Vec::with_capacity(slots);
    let mut it = orders.iter().peekable();
    for slot in 0..slots {
        while let Some(o) = it.next_if(|o| o.time_slot == slot) {
            state[o.node_id] = !state[o.node_id];
        }
        out.push(state.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(s: &str) -> Vec<bool> {
        s.chars().filter(|c| *c != ' ').map(|c| c == '1').collect()
    }

    #[test]
    fn local_examples() {
        let plan = local_schedule(0, &b("00110"), 1.0);
        assert_eq!(plan.awake_slots().collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(duty_cycle(&plan).fraction, 0.4);
        assert!(plan.is_awake_at(2.5) && !plan.is_awake_at(1.99) && !plan.is_awake_at(4.0));
        assert_eq!(duty_cycle(&local_schedule(0, &b("1111"), 0.5)).fraction, 1.0);
        assert_eq!(duty_cycle(&local_schedule(0, &b("0000"), 0.5)).fraction, 0.0);
        let empty = duty_cycle(&local_schedule(0, &[], 1.0));
        assert_eq!(empty, DutyCycle { fraction: 0.0, undefined: true });
    }

    #[test]
    fn block_widths() {
        assert_eq!(block_width(1), 1);
        assert_eq!(block_width(2), 1);
        assert_eq!(block_width(3), 2);
        assert_eq!(block_width(4), 2);
        assert_eq!(block_width(5), 3);
        assert_eq!(block_width(128), 7);
        assert_eq!(block_width(129), 8);
    }

    #[test]
    fn global_examples() {
        let ids: Vec<_> = global_schedule(&b("00 01 11"), 4).iter().map(|o| o.node_id).collect();
        assert_eq!(ids, vec![0, 1, 3]);
        assert!(global_schedule(&b("11"), 3).is_empty());
        let single = global_schedule(&b("101"), 1);
        assert_eq!(single.iter().map(|o| o.node_id).collect::<Vec<_>>(), vec![0, 0, 0]);
        // trailing partial block dropped
        assert_eq!(global_schedule(&b("01 1"), 4).len(), 1);
    }

    #[test]
    fn toggles_start_awake() {
        let orders = global_schedule(&b("01 01 10"), 4);
        let states = apply_toggles(&orders, 4, 3);
        assert_eq!(states[0], vec![true, false, true, true]);
        assert_eq!(states[1], vec![true, true, true, true]);
        assert_eq!(states[2], vec![true, true, false, true]);
    }

    proptest! {
        #[test]
        fn local_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..300)) {
            let plan = local_schedule(3, &bits, 0.25);
            let rebuilt: Vec<bool> = (0..bits.len()).map(|k| plan.is_awake_at((k as f64 + 0.5) * 0.25)).collect();
            prop_assert_eq!(rebuilt, bits);
        }

        #[test]
        fn global_ids_in_range(bits in proptest::collection::vec(any::<bool>(), 0..400), n in 1usize..300) {
            let orders = global_schedule(&bits, n);
            prop_assert!(orders.iter().all(|o| o.node_id < n));
            if n.is_power_of_two() {
                prop_assert_eq!(orders.len(), bits.len() / block_width(n));
            }
        }
    }
}
