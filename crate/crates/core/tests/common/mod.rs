//! Shared test oracles, kept independent of the engine's move generator and
//! capture resolution: everything here works square-by-square from the
//! public board accessors, with no bitboard tricks.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tablutzero::rules::{Board, GameState, Move, Piece, Side, Square};

/// Brute-force move generator: filters all 81*81 from/to pairs by the rules.
pub fn oracle_legal_moves(state: &GameState) -> Vec<Move> {
    let board = state.board();
    let mut moves = Vec::new();
    for from_idx in 0..81u8 {
        let from = Square::new(from_idx).unwrap();
        let Some(piece) = board.piece_at(from) else {
            continue;
        };
        if piece.side() != state.to_move() {
            continue;
        }
        for to_idx in 0..81u8 {
            if to_idx == from_idx {
                continue;
            }
            let to = Square::new(to_idx).unwrap();
            if from.row() != to.row() && from.col() != to.col() {
                continue;
            }
            if board.piece_at(to).is_some() {
                continue;
            }
            if piece != Piece::King && (to.is_throne() || to.is_corner()) {
                continue;
            }
            if path_clear(board, from, to) {
                moves.push(Move::new(from, to));
            }
        }
    }
    moves.sort_unstable();
    moves
}

fn path_clear(board: &Board, from: Square, to: Square) -> bool {
    let dr = (to.row() as i16 - from.row() as i16).signum();
    let dc = (to.col() as i16 - from.col() as i16).signum();
    let mut row = from.row() as i16 + dr;
    let mut col = from.col() as i16 + dc;
    while (row, col) != (to.row() as i16, to.col() as i16) {
        let sq = Square::from_row_col(row as u8, col as u8).unwrap();
        if board.piece_at(sq).is_some() {
            return false;
        }
        row += dr;
        col += dc;
    }
    true
}

/// Independent capture resolution: applies the capture bullet list literally
/// to the post-move board and returns the captured squares.
pub fn oracle_captures(state: &GameState, mv: Move) -> Vec<Square> {
    let board = state.board();
    let mover = state.to_move();
    let moved_piece = board.piece_at(mv.from).expect("move must have a piece");

    // Board after the slide, before captures.
    let piece_at = |sq: Square| -> Option<Piece> {
        if sq == mv.from {
            None
        } else if sq == mv.to {
            Some(moved_piece)
        } else {
            board.piece_at(sq)
        }
    };
    let king_square = if moved_piece == Piece::King {
        Some(mv.to)
    } else {
        board.king()
    };

    let mut captured = Vec::new();
    for (dr, dc) in [(-1i16, 0i16), (0, 1), (1, 0), (0, -1)] {
        let vr = mv.to.row() as i16 + dr;
        let vc = mv.to.col() as i16 + dc;
        if !(0..9).contains(&vr) || !(0..9).contains(&vc) {
            continue;
        }
        let victim_sq = Square::from_row_col(vr as u8, vc as u8).unwrap();
        let Some(victim) = piece_at(victim_sq) else {
            continue;
        };
        if victim.side() == mover {
            continue;
        }
        let fr = vr + dr;
        let fc = vc + dc;
        if !(0..9).contains(&fr) || !(0..9).contains(&fc) {
            continue;
        }
        let far_sq = Square::from_row_col(fr as u8, fc as u8).unwrap();
        let supports = match piece_at(far_sq) {
            Some(p) => p.side() == mover,
            None => {
                // Hostile empty square: corners for everyone; the throne for
                // attackers always and for defenders while the king is away.
                far_sq.is_corner()
                    || (far_sq.is_throne()
                        && (victim.side() == Side::Attacker
                            || king_square != Some(Square::THRONE)))
            }
        };
        if supports {
            captured.push(victim_sq);
        }
    }
    captured.sort_unstable();
    captured
}

/// Exhaustive node count at `depth` using the engine's own move list.
pub fn perft(state: &GameState, depth: u32) -> u64 {
    if depth == 0 || state.is_terminal() {
        return 1;
    }
    state
        .legal_moves()
        .unwrap()
        .into_iter()
        .map(|mv| perft(&state.apply(mv).unwrap(), depth - 1))
        .sum()
}

/// Node count at `depth` driving the engine through the action-mask path:
/// the move list is recovered by decoding every set mask bit.
pub fn perft_via_mask(state: &GameState, depth: u32) -> u64 {
    use tablutzero::encoding::{action_to_move, legal_action_mask, ActionIndex};
    if depth == 0 || state.is_terminal() {
        return 1;
    }
    let mask = legal_action_mask(state).unwrap();
    mask.set_indices()
        .into_iter()
        .map(|a| {
            let mv = action_to_move(ActionIndex(a)).unwrap();
            perft_via_mask(&state.apply(mv).unwrap(), depth - 1)
        })
        .sum()
}

/// Positions reached by random play from the initial state. Each playout
/// contributes the position after every ply until the game ends or 120 plies
/// pass, giving a mix of openings, middlegames, and sparse endgames.
pub fn random_reachable_positions(seed: u64, count: usize) -> Vec<GameState> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut positions = Vec::with_capacity(count);
    'outer: loop {
        let mut state = GameState::initial();
        for _ in 0..120 {
            if state.is_terminal() {
                break;
            }
            let moves = state.legal_moves().unwrap();
            let mv = moves[rng.gen_range(0..moves.len())];
            state = state.apply(mv).unwrap();
            if !state.is_terminal() {
                positions.push(state.clone());
                if positions.len() == count {
                    break 'outer;
                }
            }
        }
    }
    positions
}

/// A random playout's move list together with every intermediate state
/// (initial state first).
pub fn random_playout(seed: u64, max_plies: usize) -> (Vec<Move>, Vec<GameState>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut state = GameState::initial();
    let mut moves = Vec::new();
    let mut states = vec![state.clone()];
    for _ in 0..max_plies {
        if state.is_terminal() {
            break;
        }
        let legal = state.legal_moves().unwrap();
        let mv = legal[rng.gen_range(0..legal.len())];
        state = state.apply(mv).unwrap();
        moves.push(mv);
        states.push(state.clone());
    }
    (moves, states)
}
