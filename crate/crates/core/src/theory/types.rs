//! Complete quantifier-free types, i.e. orbits of atom tuples.

use super::atom::{Atom, TheoryConfig, TheoryKind};
use super::formula::{Formula, Term, Var};

/// Every complete type of a k-tuple `x1..xk`, one formula per orbit.
///
/// Without constants these are the equality patterns (set partitions) or the
/// weak orders (ordered set partitions) of the coordinates. With constants,
/// each block is additionally placed on a constant or away from all of them
/// (for the order: in one of the open intervals they cut out).
pub fn enumerate_complete_types(k: usize, cfg: &TheoryConfig, with_constants: bool) -> Vec<Formula> {
    let consts = if with_constants {
        cfg.constant_atoms()
    } else {
        Vec::new()
    };
    let vars = Var::coords(k);
    match cfg.kind() {
        TheoryKind::Equality => set_partitions(k)
            .into_iter()
            .flat_map(|blocks| {
                placements_eq(block_count(&blocks), consts.len())
                    .into_iter()
                    .map(move |place| (blocks.clone(), place))
            })
            .map(|(blocks, place)| eq_type(&vars, &blocks, &place, &consts))
            .collect(),
        TheoryKind::DenseOrder => ordered_set_partitions(k)
            .into_iter()
            .flat_map(|blocks| {
                placements_ord(block_count(&blocks), consts.len())
                    .into_iter()
                    .map(move |place| (blocks.clone(), place))
            })
            .map(|(blocks, place)| ord_type(&vars, &blocks, &place, &consts))
            .collect(),
    }
}

fn block_count(blocks: &[usize]) -> usize {
    blocks.iter().map(|b| b + 1).max().unwrap_or(0)
}

/// Restricted growth strings: block index of each element.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, k: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max {
            cur.push(b);
            go(i + 1, k, cur, if b == max { max + 1 } else { max }, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, &mut Vec::new(), 0, &mut out);
    out
}

/// Block rank of each element; ranks are 0..m and every rank is used.
fn ordered_set_partitions(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for p in set_partitions(k) {
        let m = p.iter().map(|b| b + 1).max().unwrap_or(0);
        for perm in permutations(m) {
            out.push(p.iter().map(|b| perm[*b]).collect());
        }
    }
    out
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

/// For each block: `Some(c)` when it sits on constant c, else `None`;
/// distinct blocks sit on distinct constants.
fn placements_eq(blocks: usize, consts: usize) -> Vec<Vec<Option<usize>>> {
    fn go(i: usize, n: usize, c: usize, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(i + 1, n, c, cur, out);
        cur.pop();
        for j in 0..c {
            if !cur.contains(&Some(j)) {
                cur.push(Some(j));
                go(i + 1, n, c, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(0, blocks, consts, &mut Vec::new(), &mut out);
    out
}

/// Positions 0..=2c for blocks taken in increasing rank: even positions are
/// open intervals, odd ones the constants. Positions never decrease, and two
/// blocks share a position only when it is an interval.
fn placements_ord(blocks: usize, consts: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, top: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        let from = match cur.last() {
            None => 0,
            Some(&p) if p % 2 == 1 => p + 1,
            Some(&p) => p,
        };
        for p in from..=top {
            cur.push(p);
            go(i + 1, n, top, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, blocks, 2 * consts, &mut Vec::new(), &mut out);
    out
}

fn eq_type(vars: &[Var], blocks: &[usize], place: &[Option<usize>], consts: &[Atom]) -> Formula {
    let mut lits = Vec::new();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            let (a, b) = (Term::from(&vars[i]), Term::from(&vars[j]));
            lits.push(if blocks[i] == blocks[j] {
                Formula::Eq(a, b)
            } else {
                Formula::Neq(a, b)
            });
        }
        for (c, atom) in consts.iter().enumerate() {
            let a = Term::from(&vars[i]);
            let b = Term::Const(atom.clone());
            lits.push(if place[blocks[i]] == Some(c) {
                Formula::Eq(a, b)
            } else {
                Formula::Neq(a, b)
            });
        }
    }
    Formula::and(lits)
}

fn ord_type(vars: &[Var], ranks: &[usize], place: &[usize], consts: &[Atom]) -> Formula {
    let mut lits = Vec::new();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            let (a, b) = (Term::from(&vars[i]), Term::from(&vars[j]));
            lits.push(match ranks[i].cmp(&ranks[j]) {
                std::cmp::Ordering::Equal => Formula::Eq(a, b),
                std::cmp::Ordering::Less => Formula::Lt(a, b),
                std::cmp::Ordering::Greater => Formula::Lt(b, a),
            });
        }
        let pos = place[ranks[i]];
        for (c, atom) in consts.iter().enumerate() {
            let cpos = 2 * c + 1;
            let a = Term::from(&vars[i]);
            let b = Term::Const(atom.clone());
            lits.push(match pos.cmp(&cpos) {
                std::cmp::Ordering::Equal => Formula::Eq(a, b),
                std::cmp::Ordering::Less => Formula::Lt(a, b),
                std::cmp::Ordering::Greater => Formula::Lt(b, a),
            });
        }
    }
    Formula::and(lits)
}
