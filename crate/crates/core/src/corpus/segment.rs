use serde::{Deserialize, Serialize};

/// A sentence of a page. `byte_start..byte_end` is its span in the page's
/// plain text; `text` is that span trimmed, possibly rewritten later by a
/// coreference stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub index: u32,
    pub byte_start: usize,
    pub byte_end: usize,
}

/// Lowercased abbreviations (without the final period) that never end a
/// sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "ft", "vs", "cf", "al", "approx",
    "ca", "no", "nos", "vol", "vols", "pp", "fig", "figs", "eq", "ed", "eds", "gen", "col", "lt",
    "sgt", "capt", "cmdr", "gov", "sen", "rep", "rev", "hon", "pres", "ave", "blvd", "est", "jan",
    "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
];

fn is_opening_quote(c: char) -> bool {
    matches!(c, '"' | '\'' | '\u{201c}' | '\u{2018}' | '\u{ab}')
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | '\u{201d}' | '\u{2019}' | '\u{bb}' | ')' | ']')
}

/// Splits plain text into sentences.
///
/// A sentence ends at `.`, `?` or `!` (plus any closing quotes or brackets)
/// when followed by whitespace and then an uppercase letter, a digit, an
/// opening quote, or the end of the text. Periods after known abbreviations,
/// dotted abbreviations such as `U.S.`, and name initials do not end a
/// sentence, and nothing splits inside parentheses or brackets. Line breaks
/// always end a sentence.
pub fn segment_sentences(text: &str) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut depth = 0usize;
    let mut iter = text.char_indices().peekable();

    let emit = |out: &mut Vec<Sentence>, from: usize, to: usize| {
        let span = &text[from..to];
        let trimmed = span.trim();
        if trimmed.is_empty() {
            return;
        }
        let lead = span.len() - span.trim_start().len();
        let byte_start = from + lead;
        out.push(Sentence {
            text: trimmed.to_string(),
            index: out.len() as u32,
            byte_start,
            byte_end: byte_start + trimmed.len(),
        });
    };

    while let Some((i, c)) = iter.next() {
        match c {
            '\n' => {
                emit(&mut out, start, i);
                start = i + 1;
                depth = 0;
            }
            '(' | '[' => depth += 1,
            ')' | ']' => depth = depth.saturating_sub(1),
            '.' | '?' | '!' if depth == 0 => {
                // Absorb repeated terminators and closing punctuation.
                let mut end = i + c.len_utf8();
                while let Some(&(j, d)) = iter.peek() {
                    if matches!(d, '.' | '?' | '!') || is_closing(d) {
                        end = j + d.len_utf8();
                        iter.next();
                    } else {
                        break;
                    }
                }
                let rest = &text[end..];
                let Some(first) = rest.chars().next() else {
                    continue;
                };
                if !first.is_whitespace() {
                    continue;
                }
                let after = rest.trim_start_matches(|ch: char| ch.is_whitespace() && ch != '\n');
                let next = after.chars().next();
                let starts_sentence = match next {
                    None | Some('\n') => true,
                    Some(n) => n.is_uppercase() || n.is_ascii_digit() || is_opening_quote(n),
                };
                if !starts_sentence {
                    continue;
                }
                if c == '.' && end == i + 1 && is_abbreviation(&text[start..i]) {
                    continue;
                }
                emit(&mut out, start, end);
                start = end;
            }
            _ => {}
        }
    }
    emit(&mut out, start, text.len());
    out
}

/// Decides whether the period right after `before` belongs to an
/// abbreviation. `before` is the current sentence up to that period.
fn is_abbreviation(before: &str) -> bool {
    let mut words = before.rsplit(char::is_whitespace).filter(|w| !w.is_empty());
    let Some(raw) = words.next() else {
        return false;
    };
    let token = raw.trim_start_matches(|c: char| c == '(' || c == '[' || is_opening_quote(c));
    if token.is_empty() {
        return false;
    }
    if ABBREVIATIONS.contains(&token.to_lowercase().as_str()) {
        return true;
    }
    // Dotted forms: "U.S", "e.g", "Ph.D".
    if token.contains('.')
        && token
            .split('.')
            .all(|seg| (1..=2).contains(&seg.chars().count()) && seg.chars().all(char::is_alphabetic))
    {
        return true;
    }
    let mut chars = token.chars();
    let (Some(only), None) = (chars.next(), chars.next()) else {
        return false;
    };
    if only.is_lowercase() {
        // c. 1500, b. 1950, p. 12
        return true;
    }
    if !only.is_uppercase() {
        return false;
    }
    // An uppercase initial: "A. B. Smith", "John F. Kennedy". It is not an
    // initial when it follows an ordinary lowercase word ("wrote X.").
    match words.next() {
        None => true,
        Some(prev) => {
            let prev = prev.trim_start_matches(|c: char| c == '(' || is_opening_quote(c));
            prev.chars().next().map_or(true, |p| p.is_uppercase())
        }
    }
}
