/// Normalizes a display name into its matching key.
///
/// Lowercases, trims, collapses internal whitespace runs to a single space and
/// strips trailing `.` / `,`. Interior punctuation is kept, so
/// `"physical value wrt. time"` only changes case and spacing.
pub fn canonical_key(name: &str) -> String {
    let mut key = name.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    loop {
        let stripped = key.trim_end_matches(['.', ',']).trim_end();
        if stripped.len() == key.len() {
            break;
        }
        key.truncate(stripped.len());
    }
    key
}
