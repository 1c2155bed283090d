//! The plates-and-olives state machine.
//!
//! A table holds a set of distinguishable plates with indistinguishable
//! olives on them. From every configuration four kinds of move are
//! available and the next move is chosen uniformly among all of them:
//!
//! * add an empty plate (one move),
//! * merge two plates, combining their olives (one move per unordered pair),
//! * add an olive to a plate (one move per plate),
//! * remove an olive from a plate (one move per non-empty plate).
//!
//! When two plates merge, the one with the lower id survives, so plate 1 is
//! never removed once it exists.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::InvalidMove;

/// Birth-order identity of a plate, starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlateId(pub u64);

impl PlateId {
    pub const FIRST: PlateId = PlateId(1);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Plate {
    pub id: PlateId,
    pub olives: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    AddPlate,
    /// Merge two plates; the first id is the smaller one and survives.
    MergePlates(PlateId, PlateId),
    AddOlive(PlateId),
    RemoveOlive(PlateId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    AddPlate,
    MergePlates,
    AddOlive,
    RemoveOlive,
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::AddPlate => MoveKind::AddPlate,
            Move::MergePlates(..) => MoveKind::MergePlates,
            Move::AddOlive(_) => MoveKind::AddOlive,
            Move::RemoveOlive(_) => MoveKind::RemoveOlive,
        }
    }

    pub fn is_plate_move(&self) -> bool {
        matches!(self, Move::AddPlate | Move::MergePlates(..))
    }
}

/// Number of available moves of each kind in a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveCounts {
    pub add_plate: u64,
    pub merge: u64,
    pub add_olive: u64,
    pub remove_olive: u64,
    pub total: u64,
}

impl MoveCounts {
    /// Counts for a table with `plates` plates of which `nonempty` hold olives.
    pub fn for_shape(plates: u64, nonempty: u64) -> MoveCounts {
        let merge = pairs(plates);
        MoveCounts {
            add_plate: 1,
            merge,
            add_olive: plates,
            remove_olive: nonempty,
            total: 1 + merge + plates + nonempty,
        }
    }

    pub fn plate_moves(&self) -> u64 {
        self.add_plate + self.merge
    }
}

fn pairs(n: u64) -> u64 {
    if n >= 2 {
        n * (n - 1) / 2
    } else {
        0
    }
}

/// How many moves of each kind have been performed so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct MoveCounters {
    pub add_plate: u64,
    pub merge: u64,
    pub add_olive: u64,
    pub remove_olive: u64,
}

impl MoveCounters {
    pub fn plate_moves(&self) -> u64 {
        self.add_plate + self.merge
    }

    pub fn total(&self) -> u64 {
        self.add_plate + self.merge + self.add_olive + self.remove_olive
    }
}

/// Position-based move used on the hot path. Positions index `TableState::plates`.
#[derive(Debug, Clone, Copy)]
enum Choice {
    AddPlate,
    Merge(usize, usize),
    AddOlive(usize),
    RemoveOlive(usize),
}

/// Full process state.
///
/// Plates are stored contiguously and partitioned so that the first
/// `nonempty` entries are exactly the plates holding at least one olive.
/// Positions are not stable; identity is carried by [`Plate::id`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TableState {
    plates: Vec<Plate>,
    nonempty: usize,
    total_olives: u64,
    step: u64,
    counters: MoveCounters,
    next_id: u64,
    first_plate_olives: u64,
    peak_other_olives: u64,
}

impl Default for TableState {
    fn default() -> Self {
        Self::new()
    }
}

impl TableState {
    /// The empty table at time zero.
    pub fn new() -> Self {
        TableState {
            plates: Vec::new(),
            nonempty: 0,
            total_olives: 0,
            step: 0,
            counters: MoveCounters::default(),
            next_id: 1,
            first_plate_olives: 0,
            peak_other_olives: 0,
        }
    }

    /// A reachable state with plates `1..=olives.len()` carrying the given
    /// olive counts, as produced by adding all plates first and then all
    /// olives, one at a time.
    pub fn with_plates(olives: &[u64]) -> Self {
        let mut state = TableState::new();
        for _ in olives {
            state.apply_choice(Choice::AddPlate);
        }
        for (idx, &count) in olives.iter().enumerate() {
            let id = PlateId(idx as u64 + 1);
            for _ in 0..count {
                state.apply_move(Move::AddOlive(id)).expect("plate was just created");
            }
        }
        state
    }

    pub fn plates(&self) -> &[Plate] {
        &self.plates
    }

    pub fn num_plates(&self) -> u64 {
        self.plates.len() as u64
    }

    pub fn num_nonempty(&self) -> u64 {
        self.nonempty as u64
    }

    pub fn total_olives(&self) -> u64 {
        self.total_olives
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn counters(&self) -> MoveCounters {
        self.counters
    }

    /// Number of plate moves (additions and merges) performed so far.
    pub fn plate_moves(&self) -> u64 {
        self.counters.plate_moves()
    }

    /// Olives on plate 1, or zero on the empty table.
    pub fn first_plate_olives(&self) -> u64 {
        self.first_plate_olives
    }

    /// Largest olive count ever held by a plate other than plate 1.
    pub fn peak_other_olives(&self) -> u64 {
        self.peak_other_olives
    }

    /// Olive count of the plate with the given id.
    pub fn olives_on(&self, id: PlateId) -> Option<u64> {
        self.position(id).map(|p| self.plates[p].olives)
    }

    pub fn move_counts(&self) -> MoveCounts {
        MoveCounts::for_shape(self.num_plates(), self.num_nonempty())
    }

    /// Every available move, each listed once. The list has
    /// `move_counts().total` entries.
    pub fn available_moves(&self) -> Vec<Move> {
        let mut ids: Vec<PlateId> = self.plates.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        let mut moves = Vec::with_capacity(self.move_counts().total as usize);
        moves.push(Move::AddPlate);
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                moves.push(Move::MergePlates(a, b));
            }
        }
        moves.extend(ids.iter().map(|&id| Move::AddOlive(id)));
        for &id in &ids {
            if self.olives_on(id).unwrap_or(0) > 0 {
                moves.push(Move::RemoveOlive(id));
            }
        }
        moves
    }

    /// Draws one of the available moves uniformly at random.
    pub fn sample_move<R: Rng + ?Sized>(&self, rng: &mut R) -> Move {
        self.to_move(self.sample_choice(rng))
    }

    /// Advances by one uniformly chosen move and returns it.
    pub fn step_with<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Move {
        let choice = self.sample_choice(rng);
        let mv = self.to_move(choice);
        self.apply_choice(choice);
        mv
    }

    /// Applies a move given by plate ids.
    pub fn apply_move(&mut self, mv: Move) -> Result<(), InvalidMove> {
        let choice = match mv {
            Move::AddPlate => Choice::AddPlate,
            Move::MergePlates(a, b) => {
                if a == b {
                    return Err(InvalidMove::SamePlate(a, b));
                }
                if a > b {
                    return Err(InvalidMove::Unordered(a, b));
                }
                let pa = self.position(a).ok_or(InvalidMove::NoSuchPlate(a))?;
                let pb = self.position(b).ok_or(InvalidMove::NoSuchPlate(b))?;
                Choice::Merge(pa, pb)
            }
            Move::AddOlive(id) => Choice::AddOlive(self.position(id).ok_or(InvalidMove::NoSuchPlate(id))?),
            Move::RemoveOlive(id) => {
                let p = self.position(id).ok_or(InvalidMove::NoSuchPlate(id))?;
                if self.plates[p].olives == 0 {
                    return Err(InvalidMove::EmptyPlate(id));
                }
                Choice::RemoveOlive(p)
            }
        };
        self.apply_choice(choice);
        Ok(())
    }

    /// Checks every structural invariant of the state.
    pub fn check_invariants(&self) -> Result<(), &'static str> {
        let c = self.counters;
        if self.num_plates() != c.add_plate - c.merge {
            return Err("plate count differs from additions minus merges");
        }
        if self.total_olives != c.add_olive - c.remove_olive {
            return Err("olive count differs from additions minus removals");
        }
        if self.step != c.total() {
            return Err("step differs from the number of moves performed");
        }
        // O = t - t_plate - 2 * (olive removals)
        if self.total_olives + c.plate_moves() + 2 * c.remove_olive != self.step {
            return Err("accounting identity violated");
        }
        if self.plates.iter().map(|p| p.olives).sum::<u64>() != self.total_olives {
            return Err("plate olives do not sum to the total");
        }
        if self.plates.iter().filter(|p| p.olives > 0).count() != self.nonempty {
            return Err("non-empty count is wrong");
        }
        if self.plates[..self.nonempty].iter().any(|p| p.olives == 0) {
            return Err("non-empty partition is broken");
        }
        let mut ids: Vec<u64> = self.plates.iter().map(|p| p.id.0).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err("duplicate plate id");
        }
        if !self.plates.is_empty() && ids[0] != 1 {
            return Err("plate 1 is missing");
        }
        if self.first_plate_olives != self.olives_on(PlateId::FIRST).unwrap_or(0) {
            return Err("cached first-plate olives are stale");
        }
        if self.total_olives > self.step || self.num_plates() > self.step {
            return Err("more olives or plates than steps");
        }
        Ok(())
    }

    fn position(&self, id: PlateId) -> Option<usize> {
        self.plates.iter().position(|p| p.id == id)
    }

    fn to_move(&self, choice: Choice) -> Move {
        match choice {
            Choice::AddPlate => Move::AddPlate,
            Choice::Merge(i, j) => {
                let (a, b) = (self.plates[i].id, self.plates[j].id);
                if a < b {
                    Move::MergePlates(a, b)
                } else {
                    Move::MergePlates(b, a)
                }
            }
            Choice::AddOlive(i) => Move::AddOlive(self.plates[i].id),
            Choice::RemoveOlive(i) => Move::RemoveOlive(self.plates[i].id),
        }
    }

    /// One bounded draw over `[0, M)`, decoded into a category and a target.
    fn sample_choice<R: Rng + ?Sized>(&self, rng: &mut R) -> Choice {
        let plates = self.plates.len() as u64;
        let merges = pairs(plates);
        let total = 1 + merges + plates + self.nonempty as u64;
        let mut u = rng.random_range(0..total);
        if u == 0 {
            return Choice::AddPlate;
        }
        u -= 1;
        if u < merges {
            let (i, j) = decode_pair(u);
            return Choice::Merge(i as usize, j as usize);
        }
        u -= merges;
        if u < plates {
            return Choice::AddOlive(u as usize);
        }
        Choice::RemoveOlive((u - plates) as usize)
    }

    fn apply_choice(&mut self, choice: Choice) {
        self.step += 1;
        match choice {
            Choice::AddPlate => {
                self.counters.add_plate += 1;
                self.plates.push(Plate {
                    id: PlateId(self.next_id),
                    olives: 0,
                });
                self.next_id += 1;
            }
            Choice::Merge(i, j) => {
                self.counters.merge += 1;
                let (mut keep, drop) = if self.plates[i].id < self.plates[j].id {
                    (i, j)
                } else {
                    (j, i)
                };
                let moved = self.plates[drop].olives;
                if moved > 0 {
                    // Take the olives off the dropped plate first so that it
                    // sits in the empty region, then swap-remove it there.
                    let was_empty = self.plates[keep].olives == 0;
                    self.plates[drop].olives = 0;
                    let drop_at = self.leave_nonempty(drop, &mut keep);
                    self.remove_empty_at(drop_at, &mut keep);
                    self.plates[keep].olives += moved;
                    if was_empty {
                        keep = self.enter_nonempty(keep);
                    }
                    self.note_olives(keep);
                } else {
                    self.remove_empty_at(drop, &mut keep);
                }
            }
            Choice::AddOlive(i) => {
                self.counters.add_olive += 1;
                self.total_olives += 1;
                self.plates[i].olives += 1;
                let at = if self.plates[i].olives == 1 {
                    self.enter_nonempty(i)
                } else {
                    i
                };
                self.note_olives(at);
            }
            Choice::RemoveOlive(i) => {
                self.counters.remove_olive += 1;
                self.total_olives -= 1;
                self.plates[i].olives -= 1;
                let id = self.plates[i].id;
                if self.plates[i].olives == 0 {
                    let mut unused = i;
                    self.leave_nonempty(i, &mut unused);
                }
                if id == PlateId::FIRST {
                    self.first_plate_olives -= 1;
                }
            }
        }
    }

    /// Updates the cached first-plate count and the peak for other plates
    /// after plate `i` gained olives.
    fn note_olives(&mut self, i: usize) {
        let plate = self.plates[i];
        if plate.id == PlateId::FIRST {
            self.first_plate_olives = plate.olives;
        } else if plate.olives > self.peak_other_olives {
            self.peak_other_olives = plate.olives;
        }
    }

    /// Plate at `i` just became non-empty; move it into the non-empty prefix
    /// and return its new position.
    fn enter_nonempty(&mut self, i: usize) -> usize {
        let boundary = self.nonempty;
        debug_assert!(i >= boundary);
        self.plates.swap(i, boundary);
        self.nonempty += 1;
        boundary
    }

    /// Plate at `i` just became empty; move it out of the non-empty prefix.
    /// Returns its new position and keeps `tracked` pointing at the same plate.
    fn leave_nonempty(&mut self, i: usize, tracked: &mut usize) -> usize {
        let last = self.nonempty - 1;
        self.plates.swap(i, last);
        if *tracked == last {
            *tracked = i;
        } else if *tracked == i {
            *tracked = last;
        }
        self.nonempty -= 1;
        last
    }

    /// Removes the empty plate at `i`, keeping `tracked` on the same plate.
    fn remove_empty_at(&mut self, i: usize, tracked: &mut usize) {
        debug_assert!(i >= self.nonempty);
        let last = self.plates.len() - 1;
        self.plates.swap_remove(i);
        if *tracked == last {
            *tracked = i;
        }
    }
}

/// Maps `k` in `[0, n(n-1)/2)` to the `k`-th pair `(i, j)` with `i < j`,
/// enumerating pairs by increasing `j`.
fn decode_pair(k: u64) -> (u64, u64) {
    let k = k as u128;
    // largest j with j(j-1)/2 <= k
    let mut j = (1 + 8 * k).isqrt().div_ceil(2);
    while j * (j - 1) / 2 > k {
        j -= 1;
    }
    while (j + 1) * j / 2 <= k {
        j += 1;
    }
    ((k - j * (j - 1) / 2) as u64, j as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::collections::BTreeMap;

    #[test]
    fn empty_table_has_one_move() {
        let s = TableState::new();
        assert_eq!(s.num_plates(), 0);
        assert_eq!(s.total_olives(), 0);
        let c = s.move_counts();
        assert_eq!((c.add_plate, c.merge, c.add_olive, c.remove_olive), (1, 0, 0, 0));
        assert_eq!(c.total, 1);
        assert_eq!(s.available_moves(), [Move::AddPlate]);
        let mut s2 = s.clone();
        let mv = s2.step_with(&mut seeded(3));
        assert_eq!(mv, Move::AddPlate);
        assert_eq!((s2.num_plates(), s2.total_olives()), (1, 0));
    }

    #[test]
    fn move_count_formula() {
        let c = MoveCounts::for_shape(2, 0);
        assert_eq!(
            (c.add_plate, c.merge, c.add_olive, c.remove_olive, c.total),
            (1, 1, 2, 0, 4)
        );
        let c = MoveCounts::for_shape(5, 3);
        assert_eq!(
            (c.add_plate, c.merge, c.add_olive, c.remove_olive, c.total),
            (1, 10, 5, 3, 19)
        );
        let c = MoveCounts::for_shape(3, 0);
        assert_eq!((c.merge, c.total), (3, 7));
        assert_eq!(c.plate_moves(), 4);
    }

    #[test]
    fn plate_move_probability_at_least_a_third() {
        for l in 1..=1000u64 {
            for ne in [0, l / 2, l] {
                let c = MoveCounts::for_shape(l, ne);
                assert!(3 * c.plate_moves() >= c.total, "l={l} ne={ne}");
                assert!(c.total <= 2 * l + pairs(l) + 1);
            }
        }
        for l in 1..=40u64 {
            for ne in 0..=l {
                let c = MoveCounts::for_shape(l, ne);
                assert!(3 * c.plate_moves() >= c.total, "l={l} ne={ne}");
            }
        }
    }

    #[test]
    fn merge_is_three_quarters_of_plate_moves_from_three_plates() {
        for l in 3..=1000u64 {
            let c = MoveCounts::for_shape(l, 0);
            // merge / (merge + 1) >= 3/4
            assert!(4 * c.merge >= 3 * c.plate_moves(), "l={l}");
        }
        let c = MoveCounts::for_shape(2, 0);
        assert_eq!(c.merge, c.add_plate);
    }

    #[test]
    fn pair_decoding_is_a_bijection() {
        for n in 2..40u64 {
            let mut seen = std::collections::BTreeSet::new();
            for k in 0..pairs(n) {
                let (i, j) = decode_pair(k);
                assert!(i < j && j < n);
                assert!(seen.insert((i, j)));
            }
        }
        assert_eq!(decode_pair(0), (0, 1));
        let big = 3_000_000_000u64;
        let (i, j) = decode_pair(pairs(big) - 1);
        assert_eq!((i, j), (big - 2, big - 1));
    }

    #[test]
    fn merge_conserves_olives_and_keeps_lower_id() {
        let mut s = TableState::with_plates(&[3, 2]);
        s.apply_move(Move::MergePlates(PlateId(1), PlateId(2))).unwrap();
        assert_eq!(s.num_plates(), 1);
        assert_eq!(s.olives_on(PlateId(1)), Some(5));
        assert_eq!(s.olives_on(PlateId(2)), None);
        assert_eq!(s.total_olives(), 5);
        assert_eq!(s.first_plate_olives(), 5);
        s.check_invariants().unwrap();
    }

    #[test]
    fn remove_last_olive_empties_plate() {
        let mut s = TableState::with_plates(&[1, 4]);
        assert_eq!(s.num_nonempty(), 2);
        s.apply_move(Move::RemoveOlive(PlateId(1))).unwrap();
        assert_eq!(s.num_nonempty(), 1);
        assert_eq!(s.olives_on(PlateId(1)), Some(0));
        s.check_invariants().unwrap();
    }

    #[test]
    fn invalid_moves_are_rejected() {
        let mut s = TableState::with_plates(&[0, 2]);
        assert_eq!(
            s.apply_move(Move::RemoveOlive(PlateId(1))),
            Err(InvalidMove::EmptyPlate(PlateId(1)))
        );
        assert_eq!(
            s.apply_move(Move::AddOlive(PlateId(9))),
            Err(InvalidMove::NoSuchPlate(PlateId(9)))
        );
        assert_eq!(
            s.apply_move(Move::MergePlates(PlateId(2), PlateId(2))),
            Err(InvalidMove::SamePlate(PlateId(2), PlateId(2)))
        );
        assert_eq!(
            s.apply_move(Move::MergePlates(PlateId(2), PlateId(1))),
            Err(InvalidMove::Unordered(PlateId(2), PlateId(1)))
        );
        let mut one = TableState::with_plates(&[0]);
        assert!(one.apply_move(Move::MergePlates(PlateId(1), PlateId(2))).is_err());
        s.check_invariants().unwrap();
    }

    #[test]
    fn merges_into_other_plates_update_peak() {
        let mut s = TableState::with_plates(&[0, 2, 3, 0]);
        assert_eq!(s.peak_other_olives(), 3);
        s.apply_move(Move::MergePlates(PlateId(2), PlateId(3))).unwrap();
        assert_eq!(s.peak_other_olives(), 5);
        assert_eq!(s.olives_on(PlateId(2)), Some(5));
        s.apply_move(Move::MergePlates(PlateId(1), PlateId(2))).unwrap();
        assert_eq!(s.first_plate_olives(), 5);
        assert_eq!(s.peak_other_olives(), 5);
        s.apply_move(Move::MergePlates(PlateId(1), PlateId(4))).unwrap();
        assert_eq!(s.num_plates(), 1);
        s.check_invariants().unwrap();
    }

    #[test]
    fn single_moves_change_state_by_at_most_one() {
        let mut rng = seeded(99);
        let mut s = TableState::new();
        for _ in 0..20_000 {
            let before = s.clone();
            let mv = s.step_with(&mut rng);
            let dl = s.num_plates() as i64 - before.num_plates() as i64;
            let dol = s.total_olives() as i64 - before.total_olives() as i64;
            assert!(dl.abs() <= 1 && dol.abs() <= 1);
            let bc = before.counters();
            let ac = s.counters();
            let bumps = [
                ac.add_plate - bc.add_plate,
                ac.merge - bc.merge,
                ac.add_olive - bc.add_olive,
                ac.remove_olive - bc.remove_olive,
            ];
            assert_eq!(bumps.iter().sum::<u64>(), 1);
            let expected_kind = match mv.kind() {
                MoveKind::AddPlate => 0,
                MoveKind::MergePlates => 1,
                MoveKind::AddOlive => 2,
                MoveKind::RemoveOlive => 3,
            };
            assert_eq!(bumps[expected_kind], 1);
            s.check_invariants().unwrap();
            assert_eq!(s.available_moves().len() as u64, s.move_counts().total);
        }
    }

    #[test]
    fn one_plate_step_adds_olive_half_the_time() {
        // From one empty plate the moves are {add plate, add olive}.
        let start = TableState::with_plates(&[0]);
        let mut rng = seeded(5);
        let n = 200_000;
        let hits = (0..n)
            .filter(|_| {
                let mut s = start.clone();
                s.step_with(&mut rng);
                s.total_olives() == 1
            })
            .count() as f64;
        let p = hits / n as f64;
        assert!((p - 0.5).abs() < 5.0 * (0.25 / n as f64).sqrt(), "p={p}");
    }

    #[test]
    fn p_minus_has_probability_one_fifth_with_one_nonempty() {
        let s = TableState::with_plates(&[1, 0]);
        assert_eq!(s.move_counts().total, 5);
        let mut rng = seeded(11);
        let n = 500_000;
        let merges = (0..n)
            .filter(|_| matches!(s.sample_move(&mut rng), Move::MergePlates(..)))
            .count() as f64;
        let p = merges / n as f64;
        assert!((p - 0.2).abs() < 5.0 * (0.16 / n as f64).sqrt(), "p={p}");
    }

    #[test]
    fn two_empty_plates_sample_uniformly() {
        let s = TableState::with_plates(&[0, 0]);
        let mut rng = seeded(2024);
        let n = 1_000_000u64;
        let mut freq: BTreeMap<Move, u64> = BTreeMap::new();
        for _ in 0..n {
            *freq.entry(s.sample_move(&mut rng)).or_default() += 1;
        }
        assert_eq!(freq.len(), 4);
        let expected = n as f64 / 4.0;
        let chi2: f64 = freq.values().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        // 3 degrees of freedom; the 0.9999 quantile is about 21.1
        assert!(chi2 < 21.1, "chi2={chi2}");
    }
}
