use super::mention::surface_of;
use super::Sentence;

/// A pluggable coreference stage run between segmentation and mention
/// matching. Implementations must keep the number and order of sentences.
pub trait Coreference: Send + Sync {
    fn resolve(&self, sentences: Vec<Sentence>, page_title: &str) -> Vec<Sentence>;

    fn name(&self) -> &'static str;
}

/// Looks up a built-in stage by its [`Coreference::name`]. `"identity"` is
/// accepted as an alias of `"none"`.
pub fn coref_by_name(name: &str) -> Option<Box<dyn Coreference>> {
    match name.trim().to_ascii_lowercase().as_str() {
        "pronoun" => Some(Box::new(PronounCoref)),
        "none" | "identity" => Some(Box::new(IdentityCoref)),
        _ => None,
    }
}

/// Leaves every sentence untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityCoref;

impl Coreference for IdentityCoref {
    fn resolve(&self, sentences: Vec<Sentence>, _page_title: &str) -> Vec<Sentence> {
        sentences
    }

    fn name(&self) -> &'static str {
        "none"
    }
}

/// Replaces a sentence-initial bare pronoun in sentences 2–5 with the page
/// title when the previous sentence mentions the title.
#[derive(Debug, Clone, Copy, Default)]
pub struct PronounCoref;

const PRONOUNS: &[&str] = &["It", "He", "She", "They", "This"];

/// Verbs that make a leading "This" a pronoun rather than a determiner.
const THIS_VERBS: &[&str] = &[
    "is", "was", "has", "had", "can", "could", "may", "might", "will", "would", "includes",
    "included", "means", "meant", "became", "remains", "refers", "led", "made", "allows",
];

fn leading_pronoun(text: &str) -> Option<&'static str> {
    let word_end = text
        .find(|c: char| !c.is_alphabetic())
        .unwrap_or(text.len());
    let word = &text[..word_end];
    let pronoun = PRONOUNS.iter().copied().find(|p| *p == word)?;
    let rest = &text[word_end..];
    if !rest.starts_with(|c: char| c.is_whitespace() || c == ',') {
        return None;
    }
    if pronoun == "This" {
        let next = rest
            .trim_start()
            .split(|c: char| !c.is_alphabetic())
            .next()
            .unwrap_or("");
        if !THIS_VERBS.contains(&next) {
            return None;
        }
    }
    Some(pronoun)
}

impl Coreference for PronounCoref {
    fn resolve(&self, mut sentences: Vec<Sentence>, page_title: &str) -> Vec<Sentence> {
        let surface = surface_of(page_title);
        if surface.is_empty() {
            return sentences;
        }
        let needle = surface.to_lowercase();
        for i in 1..sentences.len().min(5) {
            if !sentences[i - 1].text.to_lowercase().contains(&needle) {
                continue;
            }
            if let Some(pronoun) = leading_pronoun(&sentences[i].text) {
                let rest = &sentences[i].text[pronoun.len()..];
                sentences[i].text = format!("{surface}{rest}");
            }
        }
        sentences
    }

    fn name(&self) -> &'static str {
        "pronoun"
    }
}
