//! State and action tensor encodings.
//!
//! Maps between [`GameState`] and the network interfaces:
//!
//! - the 9x9x43 input plane stack (8 history steps x 5 planes, then player
//!   color, normalized move count, normalized half-move clock);
//! - the 2592-way action space `from*32 + direction*8 + (distance-1)` with
//!   directions N,E,S,W (N = decreasing row) and distances 1..8;
//! - the C4 rotation group acting on planes, actions, and policy vectors.
//!
//! The plane layout here is normative for checkpoint compatibility: plane
//! `5t+0` holds the side-to-move's taflmen at history step `t` (step 0 is
//! the current position, friendly/enemy fixed by the *current* player for
//! all steps), `5t+1` the opponent's taflmen, `5t+2` the king, and `5t+3`,
//! `5t+4` are all-ones planes when that position had occurred before / twice
//! before at the time it was reached. Missing history steps are zero-filled.

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use crate::rules::{
    BitBoard, Direction, GameState, Move, Side, Square, MAX_GAME_PLIES, HALFMOVE_DRAW_LIMIT,
};

/// Actions: 81 from-squares x 4 directions x 8 distances.
pub const ACTION_SPACE: usize = 2592;
/// Input planes per position.
pub const NUM_PLANES: usize = 43;
/// History steps encoded (including the current position).
pub const HISTORY_STEPS: usize = 8;
/// Planes per history step.
pub const PLANES_PER_STEP: usize = 5;
/// Board cells per plane.
pub const PLANE_CELLS: usize = 81;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodingError {
    #[error("action {0} decodes to an off-board target")]
    OffBoardAction(u16),
    #[error("action index {0} out of range")]
    ActionOutOfRange(usize),
    #[error("move {0} is not rook-geometric")]
    NonRookMove(Move),
    #[error("state is terminal")]
    TerminalState,
}

/// Index into the 2592-way action space.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ActionIndex(pub u16);

impl ActionIndex {
    pub fn new(index: usize) -> Result<ActionIndex, EncodingError> {
        if index < ACTION_SPACE {
            Ok(ActionIndex(index as u16))
        } else {
            Err(EncodingError::ActionOutOfRange(index))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_square(self) -> Square {
        Square::new((self.0 / 32) as u8).unwrap()
    }

    pub fn direction(self) -> Direction {
        Direction::from_index((self.0 as usize % 32) / 8).unwrap()
    }

    pub fn distance(self) -> u8 {
        (self.0 % 8) as u8 + 1
    }
}

/// Encode a rook move as an action index.
pub fn move_to_action(mv: Move) -> Result<ActionIndex, EncodingError> {
    let (dir, distance) = mv
        .direction_distance()
        .ok_or(EncodingError::NonRookMove(mv))?;
    let index = mv.from.index() * 32 + dir.index() * 8 + (distance as usize - 1);
    Ok(ActionIndex(index as u16))
}

/// Decode an action index to a move; errors when the target leaves the board.
pub fn action_to_move(action: ActionIndex) -> Result<Move, EncodingError> {
    let from = action.from_square();
    let dir = action.direction();
    let mut to = from;
    for _ in 0..action.distance() {
        to = to
            .step(dir)
            .ok_or(EncodingError::OffBoardAction(action.0))?;
    }
    Ok(Move::new(from, to))
}

/// Boolean mask over the 2592 actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionMask {
    bits: Vec<bool>,
}

impl ActionMask {
    pub fn empty() -> ActionMask {
        ActionMask {
            bits: vec![false; ACTION_SPACE],
        }
    }

    pub fn get(&self, action: ActionIndex) -> bool {
        self.bits[action.index()]
    }

    pub fn set(&mut self, action: ActionIndex) {
        self.bits[action.index()] = true;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    /// Ascending indices of set bits.
    pub fn set_indices(&self) -> Vec<u16> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i as u16))
            .collect()
    }
}

/// Legal-move mask for a non-terminal state.
pub fn legal_action_mask(state: &GameState) -> Result<ActionMask, EncodingError> {
    let moves = state
        .legal_moves()
        .map_err(|_| EncodingError::TerminalState)?;
    let mut mask = ActionMask::empty();
    for mv in moves {
        mask.set(move_to_action(mv).expect("legal moves are rook-geometric"));
    }
    Ok(mask)
}

/// The most recent game states, newest first, capped at [`HISTORY_STEPS`].
/// States are shared behind `Arc` so pushing is cheap for search trees.
#[derive(Clone, Debug)]
pub struct HistoryWindow {
    states: VecDeque<Arc<GameState>>,
}

impl HistoryWindow {
    pub fn new(initial: GameState) -> HistoryWindow {
        let mut states = VecDeque::with_capacity(HISTORY_STEPS);
        states.push_front(Arc::new(initial));
        HistoryWindow { states }
    }

    /// Push a successor position as the new current state.
    pub fn push(&mut self, state: GameState) {
        if self.states.len() == HISTORY_STEPS {
            self.states.pop_back();
        }
        self.states.push_front(Arc::new(state));
    }

    pub fn current(&self) -> &GameState {
        &self.states[0]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// States newest first.
    pub fn states(&self) -> impl Iterator<Item = &GameState> {
        self.states.iter().map(Arc::as_ref)
    }
}

/// Everything the encoder needs from one history step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepSnapshot {
    pub attackers: BitBoard,
    pub defenders: BitBoard,
    pub king: Option<u8>,
    /// Position had occurred at least once before when it was reached.
    pub seen_before: bool,
    /// Position had occurred at least twice before when it was reached.
    pub seen_twice: bool,
}

impl StepSnapshot {
    pub fn of(state: &GameState) -> StepSnapshot {
        let count = state.repetition_count();
        StepSnapshot {
            attackers: state.board().attackers(),
            defenders: state.board().defenders(),
            king: state.board().king().map(|k| k.index() as u8),
            seen_before: count >= 2,
            seen_twice: count >= 3,
        }
    }
}

/// Compact encoder input: snapshots newest first plus current-state scalars.
/// This is what replay samples store instead of full plane stacks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodableState {
    pub steps: Vec<StepSnapshot>,
    pub to_move: Side,
    pub ply: u32,
    pub halfmove_clock: u32,
}

impl EncodableState {
    pub fn from_window(window: &HistoryWindow) -> EncodableState {
        assert!(!window.is_empty(), "history window must be non-empty");
        let current = window.current();
        EncodableState {
            steps: window.states().map(StepSnapshot::of).collect(),
            to_move: current.to_move(),
            ply: current.ply(),
            halfmove_clock: current.halfmove_clock(),
        }
    }

    /// Fill the 43-plane stack. Friendly/enemy orientation is fixed by the
    /// current side to move across all history steps.
    pub fn encode(&self) -> PlaneStack {
        let mut planes = PlaneStack::zeros();
        for (t, step) in self.steps.iter().enumerate().take(HISTORY_STEPS) {
            let base = t * PLANES_PER_STEP;
            let (friendly, enemy) = match self.to_move {
                Side::Attacker => (step.attackers, step.defenders),
                Side::Defender => (step.defenders, step.attackers),
            };
            planes.fill_from_bits(base, friendly);
            planes.fill_from_bits(base + 1, enemy);
            if let Some(king) = step.king {
                planes.set(base + 2, king as usize, 1.0);
            }
            if step.seen_before {
                planes.fill(base + 3, 1.0);
            }
            if step.seen_twice {
                planes.fill(base + 4, 1.0);
            }
        }
        if self.to_move == Side::Attacker {
            planes.fill(40, 1.0);
        }
        planes.fill(41, (self.ply as f32 / MAX_GAME_PLIES as f32).min(1.0));
        planes.fill(
            42,
            (self.halfmove_clock as f32 / HALFMOVE_DRAW_LIMIT as f32).min(1.0),
        );
        planes
    }
}

/// Encode a history window into the network input planes.
pub fn encode_state(window: &HistoryWindow) -> PlaneStack {
    EncodableState::from_window(window).encode()
}

/// The 9x9x43 input tensor, stored plane-major (`data[plane*81 + square]`).
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneStack {
    data: Vec<f32>,
}

impl PlaneStack {
    pub fn zeros() -> PlaneStack {
        PlaneStack {
            data: vec![0.0; NUM_PLANES * PLANE_CELLS],
        }
    }

    pub fn get(&self, plane: usize, square: usize) -> f32 {
        self.data[plane * PLANE_CELLS + square]
    }

    pub fn set(&mut self, plane: usize, square: usize, value: f32) {
        self.data[plane * PLANE_CELLS + square] = value;
    }

    pub fn plane(&self, plane: usize) -> &[f32] {
        &self.data[plane * PLANE_CELLS..(plane + 1) * PLANE_CELLS]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    fn fill(&mut self, plane: usize, value: f32) {
        self.data[plane * PLANE_CELLS..(plane + 1) * PLANE_CELLS].fill(value);
    }

    fn fill_from_bits(&mut self, plane: usize, mut bits: BitBoard) {
        while bits != 0 {
            let sq = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            self.data[plane * PLANE_CELLS + sq] = 1.0;
        }
    }
}

/// One counterclockwise quarter turn of a square: (r, c) -> (8-c, r).
pub fn rotate_square(sq: Square, quarter_turns: u8) -> Square {
    let mut row = sq.row();
    let mut col = sq.col();
    for _ in 0..(quarter_turns % 4) {
        let (r, c) = (8 - col, row);
        row = r;
        col = c;
    }
    Square::from_row_col(row, col).unwrap()
}

/// Rotate the board planes by `k` quarter turns counterclockwise; the three
/// scalar planes are unchanged.
pub fn rotate_planes(planes: &PlaneStack, quarter_turns: u8) -> PlaneStack {
    let k = quarter_turns % 4;
    if k == 0 {
        return planes.clone();
    }
    let mut out = PlaneStack::zeros();
    for plane in 0..HISTORY_STEPS * PLANES_PER_STEP {
        for sq in 0..PLANE_CELLS {
            let rotated = rotate_square(Square::new(sq as u8).unwrap(), k).index();
            out.set(plane, rotated, planes.get(plane, sq));
        }
    }
    for plane in HISTORY_STEPS * PLANES_PER_STEP..NUM_PLANES {
        for sq in 0..PLANE_CELLS {
            out.set(plane, sq, planes.get(plane, sq));
        }
    }
    out
}

/// Rotate an action: the from-square turns with the board and the direction
/// advances by 3k mod 4 (N maps to W under one counterclockwise turn);
/// distance is preserved.
pub fn rotate_action(action: ActionIndex, quarter_turns: u8) -> ActionIndex {
    let k = (quarter_turns % 4) as usize;
    let from = rotate_square(action.from_square(), quarter_turns);
    let dir = (action.direction().index() + 3 * k) % 4;
    let dist = action.distance() as usize - 1;
    ActionIndex((from.index() * 32 + dir * 8 + dist) as u16)
}

/// Permute a 2592-entry policy vector by the action rotation.
pub fn rotate_policy(policy: &[f32], quarter_turns: u8) -> Vec<f32> {
    assert_eq!(policy.len(), ACTION_SPACE);
    let mut out = vec![0.0; ACTION_SPACE];
    for (a, &p) in policy.iter().enumerate() {
        out[rotate_action(ActionIndex(a as u16), quarter_turns).index()] = p;
    }
    out
}

/// Permute an action mask by the action rotation.
pub fn rotate_mask(mask: &ActionMask, quarter_turns: u8) -> ActionMask {
    let mut out = ActionMask::empty();
    for (a, &b) in mask.as_slice().iter().enumerate() {
        if b {
            out.set(rotate_action(ActionIndex(a as u16), quarter_turns));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::GameState;

    fn initial_window() -> HistoryWindow {
        HistoryWindow::new(GameState::initial())
    }

    #[test]
    fn action_formula_matches_layout() {
        // Throne north by 1.
        let mv = Move::new(Square::new(40).unwrap(), Square::new(31).unwrap());
        assert_eq!(move_to_action(mv).unwrap(), ActionIndex(1280));
        // Throne west by 1 is direction index 3.
        let mv = Move::new(Square::new(40).unwrap(), Square::new(39).unwrap());
        assert_eq!(move_to_action(mv).unwrap(), ActionIndex(1304));
    }

    #[test]
    fn decode_encode_round_trip_on_valid_subset() {
        let mut decodable = 0usize;
        for a in 0..ACTION_SPACE {
            let action = ActionIndex(a as u16);
            match action_to_move(action) {
                Ok(mv) => {
                    decodable += 1;
                    assert_eq!(move_to_action(mv).unwrap(), action);
                }
                Err(EncodingError::OffBoardAction(_)) => {}
                Err(e) => panic!("unexpected error {e:?}"),
            }
        }
        // Each square sees exactly 16 on-board ray targets (row + column
        // neighbours), so 81 * 16 stay decodable; frozen from enumeration.
        assert_eq!(decodable, 1296);
    }

    #[test]
    fn non_rook_moves_are_rejected() {
        let mv = Move::new(Square::new(0).unwrap(), Square::new(10).unwrap());
        assert!(matches!(
            move_to_action(mv),
            Err(EncodingError::NonRookMove(_))
        ));
    }

    #[test]
    fn initial_state_planes() {
        let window = initial_window();
        let planes = encode_state(&window);
        let ones = |p: usize| {
            planes
                .plane(p)
                .iter()
                .filter(|&&v| v == 1.0)
                .count()
        };
        // Attacker to move: friendly = attackers.
        assert_eq!(ones(0), 16);
        assert_eq!(ones(1), 8);
        assert_eq!(ones(2), 1);
        assert_eq!(planes.get(2, 40), 1.0);
        // No repetition yet.
        assert_eq!(ones(3), 0);
        assert_eq!(ones(4), 0);
        // Only one history step: everything beyond step 0 is zero.
        for p in PLANES_PER_STEP..HISTORY_STEPS * PLANES_PER_STEP {
            assert_eq!(ones(p), 0, "plane {p} must be zero-filled");
        }
        // Attacker moves first; clocks at zero.
        assert_eq!(ones(40), 81);
        assert_eq!(ones(41), 0);
        assert_eq!(ones(42), 0);
    }

    #[test]
    fn plane_budget_is_exact() {
        assert_eq!(NUM_PLANES, 43);
        assert_eq!(HISTORY_STEPS * PLANES_PER_STEP + 3, NUM_PLANES);
        let planes = encode_state(&initial_window());
        assert_eq!(planes.as_slice().len(), 43 * 81);
    }

    #[test]
    fn friendly_planes_follow_side_to_move() {
        let mut window = initial_window();
        let mv = Move::parse("d9-d8").unwrap();
        let next = window.current().apply(mv).unwrap();
        window.push(next);
        let planes = encode_state(&window);
        // Defender to move now: plane 0 = defender taflmen (8 ones), and the
        // previous step keeps the same orientation (defenders on plane 5).
        assert_eq!(planes.plane(0).iter().filter(|&&v| v == 1.0).count(), 8);
        assert_eq!(planes.plane(1).iter().filter(|&&v| v == 1.0).count(), 16);
        assert_eq!(planes.plane(5).iter().filter(|&&v| v == 1.0).count(), 8);
        assert_eq!(planes.plane(6).iter().filter(|&&v| v == 1.0).count(), 16);
        // Color plane flips off.
        assert_eq!(planes.plane(40).iter().filter(|&&v| v == 1.0).count(), 0);
        // Clocks normalized.
        assert!((planes.get(41, 0) - 1.0 / 512.0).abs() < 1e-7);
        assert!((planes.get(42, 0) - 1.0 / 100.0).abs() < 1e-7);
    }

    #[test]
    fn repetition_planes_from_shuffle() {
        // 4-ply shuffle returns to the initial arrangement; the current step
        // is then a repeat and its seen-before plane is all ones.
        let mut window = initial_window();
        for mv_text in ["d9-c9", "e7-d7", "c9-d9", "d7-e7"] {
            let mv = Move::parse(mv_text).unwrap();
            let next = window.current().apply(mv).unwrap();
            window.push(next);
        }
        assert_eq!(window.current().repetition_count(), 2);
        let planes = encode_state(&window);
        assert!(planes.plane(3).iter().all(|&v| v == 1.0));
        assert!(planes.plane(4).iter().all(|&v| v == 0.0));
        // The intermediate steps were first occurrences.
        assert!(planes.plane(8).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mask_matches_legal_moves() {
        let state = GameState::initial();
        let mask = legal_action_mask(&state).unwrap();
        let moves = state.legal_moves().unwrap();
        assert_eq!(mask.count(), moves.len());
        let mut decoded: Vec<Move> = mask
            .set_indices()
            .iter()
            .map(|&a| action_to_move(ActionIndex(a)).unwrap())
            .collect();
        decoded.sort_unstable();
        assert_eq!(decoded, moves);
    }

    #[test]
    fn mask_of_terminal_state_is_rejected() {
        let board = crate::rules::Board::new(0, 0, Square::new(17));
        let state = GameState::from_parts(board, Side::Defender)
            .apply(Move::parse("i8-i9").unwrap())
            .unwrap();
        assert_eq!(
            legal_action_mask(&state),
            Err(EncodingError::TerminalState)
        );
    }

    #[test]
    fn rotation_identity_and_group_law() {
        let planes = encode_state(&initial_window());
        assert_eq!(rotate_planes(&planes, 0), planes);
        for j in 0..4u8 {
            for k in 0..4u8 {
                let double = rotate_planes(&rotate_planes(&planes, j), k);
                let single = rotate_planes(&planes, (j + k) % 4);
                assert_eq!(double, single);
            }
        }
        for a in (0..ACTION_SPACE as u16).step_by(7) {
            for j in 0..4u8 {
                for k in 0..4u8 {
                    let double = rotate_action(rotate_action(ActionIndex(a), j), k);
                    assert_eq!(double, rotate_action(ActionIndex(a), (j + k) % 4));
                }
            }
        }
    }

    #[test]
    fn rotate_action_example() {
        // (from e5, N, 1) under one CCW turn becomes (e5, W, 1).
        assert_eq!(rotate_action(ActionIndex(1280), 1), ActionIndex(1304));
        assert_eq!(rotate_action(ActionIndex(1280), 0), ActionIndex(1280));
    }

    #[test]
    fn rotate_policy_is_a_permutation() {
        let mut policy = vec![0.0f32; ACTION_SPACE];
        for (i, p) in policy.iter_mut().enumerate() {
            *p = i as f32;
        }
        for k in 0..4u8 {
            let rotated = rotate_policy(&policy, k);
            let mut back = rotate_policy(&rotated, (4 - k) % 4);
            assert_eq!(back, policy);
            back.sort_by(f32::total_cmp);
            let mut sorted = policy.clone();
            sorted.sort_by(f32::total_cmp);
            assert_eq!(back, sorted);
        }
    }
}
