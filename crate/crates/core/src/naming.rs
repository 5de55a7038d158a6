//! Name normalization shared by the derivation rules.

/// `MEDICAL TREATMENT` -> `MEDICAL_TREATMENT`.
pub fn class_name(source: &str) -> String {
    join_words(source, "_").to_uppercase()
}

/// `Treatment number` -> `treatment_number`.
pub fn attribute_name(source: &str) -> String {
    join_words(source, "_").to_lowercase()
}

/// `MEDICAL_TREATMENT` -> `MedicalTreatment`, `Patient` -> `Patient`.
pub fn camel(source: &str) -> String {
    source
        .split(|c: char| c.is_whitespace() || c == '_')
        .filter(|w| !w.is_empty())
        .map(|w| {
            let mut chars = w.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().chain(chars.flat_map(char::to_lowercase)).collect(),
                None => String::new(),
            }
        })
        .collect()
}

/// Event ids as used in service names: `TREAT 1` -> `Treat1`.
pub fn event_tag(event_id: &str) -> String {
    let squashed: String = event_id.split_whitespace().collect();
    let mut chars = squashed.chars();
    match chars.next() {
        Some(first) => first
            .to_uppercase()
            .chain(chars.flat_map(char::to_lowercase))
            .collect(),
        None => String::new(),
    }
}

/// Free text as a lower-case identifier: `A nurse assigns the dispensary!`
/// -> `a_nurse_assigns_the_dispensary`.
pub fn snake(text: &str) -> String {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join("_")
}

/// Agent names are upper-cased actor names.
pub fn agent_name(actor: &str) -> String {
    class_name(actor)
}

/// Case- and separator-insensitive key used to match business objects with
/// aggregation names (`Medical treatment` ~ `MEDICAL TREATMENT`).
pub fn match_key(source: &str) -> String {
    join_words(&source.replace('_', " "), " ").to_lowercase()
}

/// Returns `base`, or `base_2`, `base_3`, ... for the first candidate not taken.
pub fn uniquify(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    (2..)
        .map(|n| format!("{base}_{n}"))
        .find(|candidate| !taken(candidate))
        .expect("unbounded suffix search")
}

fn join_words(source: &str, sep: &str) -> String {
    source.split_whitespace().collect::<Vec<_>>().join(sep)
}
