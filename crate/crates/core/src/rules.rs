//! Tablut rules engine on a 9x9 board.
//!
//! Bitboard-backed implementation of the full ruleset: rook movement with
//! restricted squares, custodial captures against pieces and hostile squares,
//! king capture/escape, repetition and no-capture draw clocks, and stalemate.
//! `GameState` is an immutable value; [`GameState::apply`] returns a new state,
//! so independent games can be processed in parallel without sharing.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Board width/height.
pub const BOARD_SIZE: usize = 9;
/// Number of squares.
pub const NUM_SQUARES: usize = 81;
/// Plies without a capture before the game is drawn.
pub const HALFMOVE_DRAW_LIMIT: u32 = 100;
/// Hard ply cap; reaching it draws the game.
pub const MAX_GAME_PLIES: u32 = 512;
/// Third occurrence of a position loses for the player who produced it.
pub const REPETITION_LIMIT: u32 = 3;

/// 81-bit occupancy set, bit `i` = square index `i`.
pub type BitBoard = u128;

const BOARD_MASK: BitBoard = (1u128 << NUM_SQUARES) - 1;

/// A square index in 0..81, row-major. Row 0 is the rank nearest the
/// attacker's first edge, column 0 the leftmost file.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Square(u8);

impl Square {
    /// Center square; start square of the king.
    pub const THRONE: Square = Square(40);
    /// The four corner squares.
    pub const CORNERS: [Square; 4] = [Square(0), Square(8), Square(72), Square(80)];

    pub fn new(index: u8) -> Option<Square> {
        (index < NUM_SQUARES as u8).then_some(Square(index))
    }

    pub fn from_row_col(row: u8, col: u8) -> Option<Square> {
        (row < 9 && col < 9).then(|| Square(row * 9 + col))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn row(self) -> u8 {
        self.0 / 9
    }

    pub fn col(self) -> u8 {
        self.0 % 9
    }

    pub fn bit(self) -> BitBoard {
        1u128 << self.0
    }

    pub fn is_corner(self) -> bool {
        matches!(self.0, 0 | 8 | 72 | 80)
    }

    pub fn is_throne(self) -> bool {
        self.0 == 40
    }

    /// Corner or throne: squares only the king may rest on.
    pub fn is_restricted(self) -> bool {
        self.is_corner() || self.is_throne()
    }

    /// Neighbour one step in `dir`, or `None` at the board edge.
    pub fn step(self, dir: Direction) -> Option<Square> {
        let (dr, dc) = dir.delta();
        let row = self.row() as i8 + dr;
        let col = self.col() as i8 + dc;
        if (0..9).contains(&row) && (0..9).contains(&col) {
            Some(Square((row * 9 + col) as u8))
        } else {
            None
        }
    }

    /// Algebraic name: files a..i left to right, ranks 1..9 bottom to top
    /// (row 0 is rank 9). The throne is "e5".
    pub fn algebraic(self) -> String {
        format!("{}{}", (b'a' + self.col()) as char, 9 - self.row())
    }

    pub fn parse_algebraic(s: &str) -> Option<Square> {
        let bytes = s.as_bytes();
        if bytes.len() != 2 {
            return None;
        }
        let col = bytes[0].checked_sub(b'a')?;
        let rank = (bytes[1] as char).to_digit(10)?;
        if col >= 9 || !(1..=9).contains(&rank) {
            return None;
        }
        Square::from_row_col(9 - rank as u8, col)
    }
}

impl fmt::Debug for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.algebraic(), self.0)
    }
}

/// The four rook directions. North is decreasing row.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    North,
    East,
    South,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::East,
        Direction::South,
        Direction::West,
    ];

    pub fn delta(self) -> (i8, i8) {
        match self {
            Direction::North => (-1, 0),
            Direction::East => (0, 1),
            Direction::South => (1, 0),
            Direction::West => (0, -1),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Direction::North => 0,
            Direction::East => 1,
            Direction::South => 2,
            Direction::West => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Direction> {
        Some(match i {
            0 => Direction::North,
            1 => Direction::East,
            2 => Direction::South,
            3 => Direction::West,
            _ => return None,
        })
    }
}

/// The two players. The attacker owns the 16 besieging taflmen and moves
/// first; the defender owns 8 taflmen and the king.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Side {
    Attacker,
    Defender,
}

impl Side {
    pub fn opponent(self) -> Side {
        match self {
            Side::Attacker => Side::Defender,
            Side::Defender => Side::Attacker,
        }
    }
}

/// What occupies a square.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Piece {
    Attacker,
    Defender,
    King,
}

impl Piece {
    pub fn side(self) -> Side {
        match self {
            Piece::Attacker => Side::Attacker,
            Piece::Defender | Piece::King => Side::Defender,
        }
    }
}

/// Piece placement: two taflman occupancy sets plus the king square.
/// The sets are pairwise disjoint and the king is tracked separately
/// (`defenders` never includes it).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Board {
    attackers: BitBoard,
    defenders: BitBoard,
    king: Option<Square>,
}

impl Board {
    pub fn new(attackers: BitBoard, defenders: BitBoard, king: Option<Square>) -> Board {
        debug_assert_eq!(attackers & !BOARD_MASK, 0);
        debug_assert_eq!(defenders & !BOARD_MASK, 0);
        debug_assert_eq!(attackers & defenders, 0);
        if let Some(k) = king {
            debug_assert_eq!((attackers | defenders) & k.bit(), 0);
        }
        Board {
            attackers,
            defenders,
            king,
        }
    }

    pub fn attackers(&self) -> BitBoard {
        self.attackers
    }

    pub fn defenders(&self) -> BitBoard {
        self.defenders
    }

    /// King square; `None` once the king has been captured.
    pub fn king(&self) -> Option<Square> {
        self.king
    }

    pub fn occupied(&self) -> BitBoard {
        self.attackers | self.defenders | self.king.map_or(0, Square::bit)
    }

    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        if self.attackers & sq.bit() != 0 {
            Some(Piece::Attacker)
        } else if self.defenders & sq.bit() != 0 {
            Some(Piece::Defender)
        } else if self.king == Some(sq) {
            Some(Piece::King)
        } else {
            None
        }
    }

    pub fn attacker_count(&self) -> u32 {
        self.attackers.count_ones()
    }

    pub fn defender_count(&self) -> u32 {
        self.defenders.count_ones()
    }

    /// Total pieces on the board, king included.
    pub fn piece_count(&self) -> u32 {
        self.attacker_count() + self.defender_count() + u32::from(self.king.is_some())
    }

    /// All pieces belonging to `side`, king included for the defender.
    pub fn side_occupancy(&self, side: Side) -> BitBoard {
        match side {
            Side::Attacker => self.attackers,
            Side::Defender => self.defenders | self.king.map_or(0, Square::bit),
        }
    }
}

/// A rook move from one square to another along an empty line.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub from: Square,
    pub to: Square,
}

impl Move {
    pub fn new(from: Square, to: Square) -> Move {
        Move { from, to }
    }

    /// Direction and distance of the slide, if `from` and `to` share a line.
    pub fn direction_distance(&self) -> Option<(Direction, u8)> {
        let (fr, fc) = (self.from.row(), self.from.col());
        let (tr, tc) = (self.to.row(), self.to.col());
        if fr == tr && fc != tc {
            if tc > fc {
                Some((Direction::East, tc - fc))
            } else {
                Some((Direction::West, fc - tc))
            }
        } else if fc == tc && fr != tr {
            if tr > fr {
                Some((Direction::South, tr - fr))
            } else {
                Some((Direction::North, fr - tr))
            }
        } else {
            None
        }
    }

    /// Parse "e3-e5" style coordinates.
    pub fn parse(s: &str) -> Option<Move> {
        let (a, b) = s.split_once('-')?;
        Some(Move::new(
            Square::parse_algebraic(a.trim())?,
            Square::parse_algebraic(b.trim())?,
        ))
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.from.algebraic(), self.to.algebraic())
    }
}

impl fmt::Debug for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.from.algebraic(), self.to.algebraic())
    }
}

/// Who won (or a draw).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum OutcomeValue {
    AttackerWin,
    DefenderWin,
    Draw,
}

/// Why the game ended.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum OutcomeReason {
    KingCaptured,
    KingEscaped,
    NoMoves,
    ThirdRepetition,
    HalfmoveDraw,
    MaxPlyDraw,
}

/// Terminal result of a game.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Outcome {
    pub value: OutcomeValue,
    pub reason: OutcomeReason,
}

impl Outcome {
    pub fn winner(&self) -> Option<Side> {
        match self.value {
            OutcomeValue::AttackerWin => Some(Side::Attacker),
            OutcomeValue::DefenderWin => Some(Side::Defender),
            OutcomeValue::Draw => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RulesError {
    #[error("game is already over")]
    TerminalState,
    #[error("illegal move {mv}: {why}")]
    IllegalMove { mv: Move, why: &'static str },
}

// Zobrist-style tabulation constants, generated at compile time from a fixed
// seed via splitmix64 so position keys are stable across builds.
const ZOBRIST_SEED: u64 = 0x7AB1_0759_C0FF_EE00;

const fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct ZobristTable {
    attacker: [u64; NUM_SQUARES],
    defender: [u64; NUM_SQUARES],
    king: [u64; NUM_SQUARES],
    attacker_to_move: u64,
}

const ZOBRIST: ZobristTable = {
    let mut table = ZobristTable {
        attacker: [0; NUM_SQUARES],
        defender: [0; NUM_SQUARES],
        king: [0; NUM_SQUARES],
        attacker_to_move: 0,
    };
    let mut state = ZOBRIST_SEED;
    let mut i = 0;
    while i < NUM_SQUARES {
        state = state.wrapping_add(1);
        table.attacker[i] = splitmix64(state);
        state = state.wrapping_add(1);
        table.defender[i] = splitmix64(state);
        state = state.wrapping_add(1);
        table.king[i] = splitmix64(state);
        i += 1;
    }
    table.attacker_to_move = splitmix64(state.wrapping_add(1));
    table
};

fn zobrist_key(board: &Board, to_move: Side) -> u64 {
    let mut key = 0u64;
    let mut bits = board.attackers;
    while bits != 0 {
        key ^= ZOBRIST.attacker[bits.trailing_zeros() as usize];
        bits &= bits - 1;
    }
    let mut bits = board.defenders;
    while bits != 0 {
        key ^= ZOBRIST.defender[bits.trailing_zeros() as usize];
        bits &= bits - 1;
    }
    if let Some(k) = board.king {
        key ^= ZOBRIST.king[k.index()];
    }
    if to_move == Side::Attacker {
        key ^= ZOBRIST.attacker_to_move;
    }
    key
}

/// Full game position: placement, side to move, clocks, per-game repetition
/// table, and the terminal outcome once decided.
#[derive(Clone, Debug)]
pub struct GameState {
    board: Board,
    to_move: Side,
    ply: u32,
    halfmove_clock: u32,
    repetitions: HashMap<u64, u32>,
    outcome: Option<Outcome>,
}

impl GameState {
    /// Starting position: king on the throne, 8 defenders on the orthogonal
    /// cross at distances 1 and 2, and 16 attackers in four T-shaped groups
    /// (the three central squares of each edge plus the square inboard of
    /// each edge midpoint). The attacker moves first.
    pub fn initial() -> GameState {
        let mut attackers: BitBoard = 0;
        let mut defenders: BitBoard = 0;
        for &(row, col) in &[
            (0, 3),
            (0, 4),
            (0, 5),
            (1, 4),
            (8, 3),
            (8, 4),
            (8, 5),
            (7, 4),
            (3, 0),
            (4, 0),
            (5, 0),
            (4, 1),
            (3, 8),
            (4, 8),
            (5, 8),
            (4, 7),
        ] {
            attackers |= Square::from_row_col(row, col).unwrap().bit();
        }
        for &(row, col) in &[
            (2, 4),
            (3, 4),
            (5, 4),
            (6, 4),
            (4, 2),
            (4, 3),
            (4, 5),
            (4, 6),
        ] {
            defenders |= Square::from_row_col(row, col).unwrap().bit();
        }
        let board = Board::new(attackers, defenders, Some(Square::THRONE));
        let to_move = Side::Attacker;
        let mut repetitions = HashMap::new();
        repetitions.insert(zobrist_key(&board, to_move), 1);
        GameState {
            board,
            to_move,
            ply: 0,
            halfmove_clock: 0,
            repetitions,
            outcome: None,
        }
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn to_move(&self) -> Side {
        self.to_move
    }

    pub fn ply(&self) -> u32 {
        self.ply
    }

    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    /// Terminal outcome; `None` while the game is in progress.
    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn is_terminal(&self) -> bool {
        self.outcome.is_some()
    }

    /// Tabulation hash of (attacker set, defender set, king square, side to
    /// move). Equal positions always produce equal keys.
    pub fn position_key(&self) -> u64 {
        zobrist_key(&self.board, self.to_move)
    }

    /// Occurrences of the current position (including this one).
    pub fn repetition_count(&self) -> u32 {
        *self.repetitions.get(&self.position_key()).unwrap_or(&0)
    }

    /// True iff `sq` can stand in for an enemy piece when capturing a piece
    /// of `victim_side`: corners are hostile to both sides; the throne is
    /// hostile to attackers always, and to defenders only while the king is
    /// off the throne.
    pub fn is_hostile(sq: Square, victim_side: Side, board: &Board) -> bool {
        if sq.is_corner() {
            return true;
        }
        if sq.is_throne() {
            return match victim_side {
                Side::Attacker => true,
                Side::Defender => board.king() != Some(Square::THRONE),
            };
        }
        false
    }

    /// All legal moves for the side to move, sorted by (from, to).
    ///
    /// Pieces slide like rooks along empty lines. Taflmen may pass over the
    /// empty throne but may not stop on it nor on corners; the king may stop
    /// anywhere empty.
    pub fn legal_moves(&self) -> Result<Vec<Move>, RulesError> {
        if self.is_terminal() {
            return Err(RulesError::TerminalState);
        }
        let mut moves = Vec::with_capacity(64);
        self.for_each_move(|mv| {
            moves.push(mv);
            true
        });
        moves.sort_unstable();
        Ok(moves)
    }

    /// Walk every legal move; the callback returns `false` to stop early.
    /// Enumeration order is by piece bit index, then direction, then distance.
    fn for_each_move(&self, mut f: impl FnMut(Move) -> bool) -> bool {
        let occupied = self.board.occupied();
        let mut pieces = self.board.side_occupancy(self.to_move);
        while pieces != 0 {
            let from = Square(pieces.trailing_zeros() as u8);
            pieces &= pieces - 1;
            let is_king = self.board.king() == Some(from);
            for dir in Direction::ALL {
                let mut sq = from;
                while let Some(next) = sq.step(dir) {
                    if occupied & next.bit() != 0 {
                        break;
                    }
                    if is_king || !next.is_restricted() {
                        if !f(Move::new(from, next)) {
                            return false;
                        }
                    }
                    sq = next;
                }
            }
        }
        true
    }

    fn has_legal_move(&self) -> bool {
        !self.for_each_move(|_| false)
    }

    /// Validity of a single move without generating the full move list.
    fn check_move(&self, mv: Move) -> Result<(), &'static str> {
        let piece = self.board.piece_at(mv.from).ok_or("no piece on from-square")?;
        if piece.side() != self.to_move {
            return Err("piece does not belong to the side to move");
        }
        let (dir, distance) = mv
            .direction_distance()
            .ok_or("from and to do not share a rank or file")?;
        if !(piece == Piece::King) && mv.to.is_restricted() {
            return Err("only the king may stop on the throne or corners");
        }
        let occupied = self.board.occupied();
        let mut sq = mv.from;
        for _ in 0..distance {
            sq = sq.step(dir).ok_or("move runs off the board")?;
            if occupied & sq.bit() != 0 {
                return Err("path is blocked");
            }
        }
        Ok(())
    }

    /// Apply a legal move, resolving captures and terminal conditions.
    ///
    /// Every enemy piece orthogonally adjacent to the destination is removed
    /// iff the square on its far side holds a friendly piece of the mover or
    /// is hostile to the victim. All such captures resolve simultaneously.
    /// A piece that moves itself between two enemies is not captured.
    /// The king is captured like any other piece and participates in
    /// captures like a defender taflman.
    pub fn apply(&self, mv: Move) -> Result<GameState, RulesError> {
        if self.is_terminal() {
            return Err(RulesError::TerminalState);
        }
        if let Err(why) = self.check_move(mv) {
            return Err(RulesError::IllegalMove { mv, why });
        }

        let mover = self.to_move;
        let mut attackers = self.board.attackers;
        let mut defenders = self.board.defenders;
        let mut king = self.board.king;

        let moved_piece = self.board.piece_at(mv.from).unwrap();
        match moved_piece {
            Piece::Attacker => attackers = (attackers & !mv.from.bit()) | mv.to.bit(),
            Piece::Defender => defenders = (defenders & !mv.from.bit()) | mv.to.bit(),
            Piece::King => king = Some(mv.to),
        }
        let board_after_move = Board::new(attackers, defenders, king);

        // Custodial captures triggered by the mover arriving on mv.to.
        let mover_pieces = board_after_move.side_occupancy(mover);
        let mut captured: BitBoard = 0;
        for dir in Direction::ALL {
            let Some(victim_sq) = mv.to.step(dir) else {
                continue;
            };
            let Some(victim) = board_after_move.piece_at(victim_sq) else {
                continue;
            };
            if victim.side() == mover {
                continue;
            }
            let Some(far_sq) = victim_sq.step(dir) else {
                continue;
            };
            let far_friendly = mover_pieces & far_sq.bit() != 0;
            let far_hostile = board_after_move.piece_at(far_sq).is_none()
                && Self::is_hostile(far_sq, victim.side(), &board_after_move);
            if far_friendly || far_hostile {
                captured |= victim_sq.bit();
            }
        }

        let any_capture = captured != 0;
        attackers &= !captured;
        defenders &= !captured;
        if let Some(k) = king {
            if captured & k.bit() != 0 {
                king = None;
            }
        }
        let board = Board::new(attackers, defenders, king);

        let to_move = mover.opponent();
        let ply = self.ply + 1;
        let halfmove_clock = if any_capture {
            0
        } else {
            self.halfmove_clock + 1
        };
        let mut repetitions = self.repetitions.clone();
        let key = zobrist_key(&board, to_move);
        let count = repetitions.entry(key).or_insert(0);
        *count += 1;
        let repetition_count = *count;

        let mut state = GameState {
            board,
            to_move,
            ply,
            halfmove_clock,
            repetitions,
            outcome: None,
        };
        state.outcome = state.detect_outcome(mover, repetition_count);
        Ok(state)
    }

    /// Terminal checks, in fixed order: king captured, king escaped, third
    /// repetition (loss for the mover), 100-ply no-capture draw, 512-ply
    /// draw, opponent stalemate (loss for the player to move).
    fn detect_outcome(&self, mover: Side, repetition_count: u32) -> Option<Outcome> {
        if self.board.king().is_none() {
            return Some(Outcome {
                value: OutcomeValue::AttackerWin,
                reason: OutcomeReason::KingCaptured,
            });
        }
        if self.board.king().is_some_and(Square::is_corner) {
            return Some(Outcome {
                value: OutcomeValue::DefenderWin,
                reason: OutcomeReason::KingEscaped,
            });
        }
        if repetition_count >= REPETITION_LIMIT {
            let value = match mover {
                Side::Attacker => OutcomeValue::DefenderWin,
                Side::Defender => OutcomeValue::AttackerWin,
            };
            return Some(Outcome {
                value,
                reason: OutcomeReason::ThirdRepetition,
            });
        }
        if self.halfmove_clock >= HALFMOVE_DRAW_LIMIT {
            return Some(Outcome {
                value: OutcomeValue::Draw,
                reason: OutcomeReason::HalfmoveDraw,
            });
        }
        if self.ply >= MAX_GAME_PLIES {
            return Some(Outcome {
                value: OutcomeValue::Draw,
                reason: OutcomeReason::MaxPlyDraw,
            });
        }
        if !self.has_legal_move() {
            let value = match self.to_move {
                Side::Attacker => OutcomeValue::DefenderWin,
                Side::Defender => OutcomeValue::AttackerWin,
            };
            return Some(Outcome {
                value,
                reason: OutcomeReason::NoMoves,
            });
        }
        None
    }

    /// Test-support constructor for hand-built positions. Clocks start at
    /// zero and the repetition table is seeded with the given position.
    pub fn from_parts(board: Board, to_move: Side) -> GameState {
        Self::from_parts_with_clocks(board, to_move, 0, 0)
    }

    /// [`GameState::from_parts`] with explicit ply and half-move clocks, for
    /// exercising the clock-based terminal rules directly.
    pub fn from_parts_with_clocks(
        board: Board,
        to_move: Side,
        ply: u32,
        halfmove_clock: u32,
    ) -> GameState {
        let mut repetitions = HashMap::new();
        repetitions.insert(zobrist_key(&board, to_move), 1);
        let mut state = GameState {
            board,
            to_move,
            ply,
            halfmove_clock,
            repetitions,
            outcome: None,
        };
        // A constructed position may already be decided (king on a corner,
        // expired clock, side to move with no moves).
        state.outcome = state.detect_outcome(to_move.opponent(), 1);
        state
    }

    /// Plain-text board: A/D/K for pieces, `·` for empty squares, `×` for
    /// the empty throne and `⊕` for empty corners.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in 0..9u8 {
            out.push_str(&format!("{} ", 9 - row));
            for col in 0..9u8 {
                let sq = Square::from_row_col(row, col).unwrap();
                let ch = match self.board.piece_at(sq) {
                    Some(Piece::Attacker) => 'A',
                    Some(Piece::Defender) => 'D',
                    Some(Piece::King) => 'K',
                    None if sq.is_throne() => '×',
                    None if sq.is_corner() => '⊕',
                    None => '·',
                };
                out.push(ch);
                if col < 8 {
                    out.push(' ');
                }
            }
            out.push('\n');
        }
        out.push_str("  a b c d e f g h i\n");
        out
    }
}

/// One finished game in the JSONL record format: moves as (from, to) index
/// pairs plus the outcome summary.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GameRecord {
    pub moves: Vec<(u8, u8)>,
    pub outcome: OutcomeValue,
    pub reason: OutcomeReason,
    pub ply_count: u32,
    pub final_piece_count: u32,
}

impl GameRecord {
    pub fn from_moves(moves: &[Move], final_state: &GameState) -> GameRecord {
        let outcome = final_state
            .outcome()
            .expect("game record requires a terminal state");
        GameRecord {
            moves: moves.iter().map(|m| (m.from.0, m.to.0)).collect(),
            outcome: outcome.value,
            reason: outcome.reason,
            ply_count: final_state.ply(),
            final_piece_count: final_state.board().piece_count(),
        }
    }
}
