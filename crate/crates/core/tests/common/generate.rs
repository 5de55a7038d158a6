//! Random requirements models for the property suites.
//!
//! Events `P 1` .. `P n` are linked by precedences from lower to higher
//! numbers only, plus flagged loopbacks. Each event either creates a business
//! object (optionally with a nested iteration) or extends an object created
//! by one of its ancestors. Reference fields only name objects created by
//! ancestors, so every generated model derives without errors.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use proptest::prelude::*;
use proptest::sample::Index;

const DOMAINS: [&str; 5] = ["number", "text", "date", "time", "money"];
const OPS: [&str; 3] = ["g", "i", ""];
const CARDS: [&str; 4] = ["0:1", "1:1", "0:M", "1:M"];

#[derive(Debug, Clone)]
pub struct RawEvent {
    extend: bool,
    target: Index,
    preds: Vec<Index>,
    loopback: Option<Index>,
    data: Vec<(usize, usize)>,
    refs: Vec<(Index, Option<(usize, usize)>)>,
    nested: Option<Vec<usize>>,
    identifier: bool,
    variants: bool,
    manager: bool,
}

fn raw_event() -> impl Strategy<Value = RawEvent> {
    let card = (0..CARDS.len(), 0..CARDS.len());
    (
        any::<bool>(),
        any::<Index>(),
        prop::collection::vec(any::<Index>(), 0..3),
        prop::option::weighted(0.15, any::<Index>()),
        prop::collection::vec((0..DOMAINS.len(), 0..OPS.len()), 1..4),
        prop::collection::vec((any::<Index>(), prop::option::of(card)), 0..3),
        prop::option::weighted(0.3, prop::collection::vec(0..DOMAINS.len(), 1..3)),
        any::<bool>(),
        prop::bool::weighted(0.2),
        any::<bool>(),
    )
        .prop_map(
            |(extend, target, preds, loopback, data, refs, nested, identifier, variants, manager)| RawEvent {
                extend,
                target,
                preds,
                loopback,
                data,
                refs,
                nested,
                identifier,
                variants,
                manager,
            },
        )
}

/// `.carm` sources of random models with 1 to 12 events.
pub fn model_source() -> impl Strategy<Value = String> {
    prop::collection::vec(raw_event(), 1..=12).prop_map(|events| render(&events))
}

fn render(raw: &[RawEvent]) -> String {
    let n = raw.len();
    let mut preds: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut ancestors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 1..n {
        preds[i] = raw[i].preds.iter().map(|ix| ix.index(i)).collect();
        let mut anc = BTreeSet::new();
        for &p in &preds[i] {
            anc.insert(p);
            anc.extend(ancestors[p].iter().copied());
        }
        ancestors[i] = anc;
    }

    // creator[i]: the object created by event i, if any
    let mut creates = vec![false; n];
    let mut extends: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let candidates: Vec<usize> = ancestors[i].iter().copied().filter(|&a| creates[a]).collect();
        if raw[i].extend && !candidates.is_empty() {
            extends[i] = Some(candidates[raw[i].target.index(candidates.len())]);
        } else {
            creates[i] = true;
        }
    }

    let objects: Vec<String> = (0..n).filter(|&i| creates[i]).map(|i| format!("Obj{i}")).collect();
    let mut out = String::new();
    if !objects.is_empty() {
        let _ = writeln!(out, "objects: {}\n", objects.join(", "));
    }
    out.push_str("process P \"Generated\"\n");
    for i in 0..n {
        if preds[i].is_empty() {
            let _ = writeln!(out, "  START -> P {i}");
        }
        for p in &preds[i] {
            let _ = writeln!(out, "  P {p} -> P {i}");
        }
        if let Some(ix) = &raw[i].loopback {
            if i > 0 {
                let _ = writeln!(out, "  P {i} -> P {} [loopback]", ix.index(i));
            }
        }
    }
    for (i, ev) in raw.iter().enumerate() {
        let actor = if ev.manager { "Manager" } else { "Clerk" };
        let _ = writeln!(out, "\n  event P {i} \"Event number {i}\"");
        let _ = writeln!(out, "    primary: {actor}");
        let _ = writeln!(out, "    interface: {actor}");
        out.push_str("    message:\n");
        let creatable: Vec<usize> = ancestors[i].iter().copied().filter(|&a| creates[a]).collect();
        let refs: Vec<(usize, Option<(usize, usize)>)> = if creatable.is_empty() {
            Vec::new()
        } else {
            let mut seen = BTreeSet::new();
            ev.refs
                .iter()
                .map(|(ix, card)| (creatable[ix.index(creatable.len())], *card))
                .filter(|(o, _)| seen.insert(*o))
                .collect()
        };
        let mut lines: Vec<String> = Vec::new();
        if let Some(target) = extends[i] {
            let _ = writeln!(out, "      EXT{i} =");
            lines.push(format!("Target{i} | i | Obj{target} | 1 | True"));
        } else {
            let _ = writeln!(out, "      OBJ{i} =");
        }
        for (k, (d, op)) in ev.data.iter().enumerate() {
            lines.push(format!("F{i}_{k} | {} | {} | 1", OPS[*op], DOMAINS[*d]));
        }
        for (o, _) in &refs {
            lines.push(format!("Ref{i}_{o} | i | Obj{o} | 1"));
        }
        let nested = ev.nested.as_ref().filter(|_| creates[i]);
        let mut first = true;
        let count = lines.len();
        for (k, line) in lines.iter().enumerate() {
            let lead = if first { "< " } else { "" };
            first = false;
            let more = k + 1 < count || nested.is_some();
            let (name, rest) = line.split_once(" |").expect("field line");
            let plus = if more { " +" } else { "" };
            let _ = writeln!(out, "      {lead}{name}{plus} |{rest}");
        }
        if let Some(nested) = nested {
            let _ = writeln!(out, "      ITEMS{i} =");
            let _ = writeln!(out, "      {{ ITEM{i} =");
            for (k, d) in nested.iter().enumerate() {
                let lead = if k == 0 { "< " } else { "" };
                let plus = if k + 1 < nested.len() { " +" } else { "" };
                let _ = writeln!(out, "      {lead}G{i}_{k}{plus} | i | {} | 1", DOMAINS[*d]);
            }
            out.push_str("      >\n      }\n");
        }
        out.push_str("      >\n");
        for (o, card) in &refs {
            if let Some((a, b)) = card {
                let _ = writeln!(out, "    restriction: Ref{i}_{o} {} {}", CARDS[*a], CARDS[*b]);
            }
        }
        if creates[i] && ev.identifier {
            let _ = writeln!(out, "    identifier: F{i}_0");
        }
        if ev.variants {
            let _ = writeln!(out, "    variant: P {i}A when F{i}_0 = 1");
            let _ = writeln!(out, "    variant: P {i}B when F{i}_0 <> 1");
        }
        out.push_str("  end\n");
    }
    out.push_str("end\n");
    out
}
