//! Brute-force reference implementations used to check the derivation.

use std::collections::{BTreeMap, BTreeSet};

pub type EventSet = BTreeSet<String>;
/// `(before, after, event)`: the prefix grows from `before` to `after` when `event` occurs.
pub type Link = (EventSet, EventSet, String);

/// Every permutation of `items`.
pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// `order` places every edge's source before its target and lists each node once.
pub fn respects(order: &[String], nodes: &BTreeSet<String>, edges: &[(String, String)]) -> bool {
    let position: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    position.len() == order.len()
        && order.len() == nodes.len()
        && nodes.iter().all(|n| position.contains_key(n.as_str()))
        && edges.iter().all(|(a, b)| position[a.as_str()] < position[b.as_str()])
}

/// All linear extensions of the partial order, by checking every permutation.
pub fn linear_extensions(nodes: &BTreeSet<String>, edges: &[(String, String)]) -> BTreeSet<Vec<String>> {
    let items: Vec<String> = nodes.iter().cloned().collect();
    permutations(&items)
        .into_iter()
        .filter(|p| respects(p, nodes, edges))
        .collect()
}

/// The and-join network built literally: one row per allowed sequence of
/// the precedents, one cell per prefix (the set of events occurred so far),
/// equal cells merged. Returns the merged states and the links between
/// consecutive cells, labelled with the precedent that occurs.
pub fn and_join_matrix(precedents: &[String]) -> (BTreeSet<EventSet>, BTreeSet<Link>) {
    let rows = permutations(precedents);
    let mut matrix: Vec<Vec<EventSet>> = Vec::new();
    for row in &rows {
        let mut cells = vec![BTreeSet::new()];
        for event in row {
            let mut next = cells.last().expect("row has a first cell").clone();
            next.insert(event.clone());
            cells.push(next);
        }
        matrix.push(cells);
    }
    let mut states = BTreeSet::new();
    let mut links = BTreeSet::new();
    for (row, cells) in rows.iter().zip(&matrix) {
        for (j, cell) in cells.iter().enumerate() {
            states.insert(cell.clone());
            if j + 1 < cells.len() {
                links.insert((cell.clone(), cells[j + 1].clone(), row[j].clone()));
            }
        }
    }
    (states, links)
}
