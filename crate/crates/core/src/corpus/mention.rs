use std::collections::HashMap;

use crate::wikidump::CleanPage;

pub(crate) use crate::wikidump::strip_disambiguator as surface_of;

/// Page-local dictionary from mention surface to entity identifier.
///
/// Built from the page's links plus self-entries for the page title and its
/// disambiguator-free form. Besides exact lookups it answers lookups where
/// only the case of the first character differs, so a sentence-initial
/// "Machine learning" finds the anchor written as "machine learning".
#[derive(Debug, Clone)]
pub struct MentionMap {
    source_page: String,
    exact: HashMap<String, String>,
    folded: HashMap<String, String>,
    max_mention_len: usize,
    collisions: usize,
}

fn fold_first(s: &str) -> Option<String> {
    let mut chars = s.chars();
    let first = chars.next()?;
    if !first.is_uppercase() {
        return None;
    }
    let mut out: String = first.to_lowercase().collect();
    out.push_str(chars.as_str());
    Some(out)
}

impl MentionMap {
    /// A map holding only the self-entries for `title`.
    pub fn new(title: &str) -> MentionMap {
        let mut map = MentionMap {
            source_page: title.to_string(),
            exact: HashMap::new(),
            folded: HashMap::new(),
            max_mention_len: 0,
            collisions: 0,
        };
        map.insert(title, title);
        map.insert(surface_of(title), title);
        map
    }

    /// Adds `mention → entity`. The first entity recorded for a surface
    /// wins; a later, different entity counts as a collision.
    pub fn insert(&mut self, mention: &str, entity: &str) -> bool {
        let mention = mention.trim();
        if mention.is_empty() || entity.is_empty() {
            return false;
        }
        if let Some(existing) = self.exact.get(mention) {
            if existing != entity {
                self.collisions += 1;
            }
            return false;
        }
        self.exact.insert(mention.to_string(), entity.to_string());
        let key = fold_first(mention).unwrap_or_else(|| mention.to_string());
        self.folded.entry(key).or_insert_with(|| entity.to_string());
        self.max_mention_len = self.max_mention_len.max(mention.len());
        true
    }

    pub fn get(&self, mention: &str) -> Option<&str> {
        self.exact.get(mention).map(String::as_str)
    }

    /// Exact lookup, falling back to first-character case folding.
    pub fn lookup(&self, candidate: &str) -> Option<&str> {
        if let Some(e) = self.exact.get(candidate) {
            return Some(e);
        }
        match fold_first(candidate) {
            Some(key) => self.folded.get(&key),
            None => self.folded.get(candidate),
        }
        .map(String::as_str)
    }

    pub fn source_page(&self) -> &str {
        &self.source_page
    }

    /// Length in bytes of the longest mention; bounds the matcher window.
    pub fn max_mention_len(&self) -> usize {
        self.max_mention_len
    }

    pub fn collisions(&self) -> usize {
        self.collisions
    }

    pub fn len(&self) -> usize {
        self.exact.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty()
    }

    /// Entries sorted by mention.
    pub fn entries(&self) -> Vec<(&str, &str)> {
        let mut v: Vec<_> = self
            .exact
            .iter()
            .map(|(m, e)| (m.as_str(), e.as_str()))
            .collect();
        v.sort_unstable();
        v
    }
}

pub fn build_mention_map(page: &CleanPage) -> MentionMap {
    let mut map = MentionMap::new(&page.title);
    for anchor in &page.anchors {
        map.insert(&anchor.mention, &anchor.target);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wikidump::LinkAnchor;

    fn page(title: &str, anchors: &[(&str, &str)]) -> CleanPage {
        CleanPage {
            title: title.into(),
            page_id: 1,
            plain_text: String::new(),
            anchors: anchors
                .iter()
                .map(|(m, t)| LinkAnchor {
                    mention: m.to_string(),
                    target: t.to_string(),
                    byte_start: 0,
                    byte_end: m.len(),
                })
                .collect(),
        }
    }

    #[test]
    fn self_entry_and_anchor() {
        let map = build_mention_map(&page("Data mining", &[("ML", "Machine learning")]));
        assert_eq!(
            map.entries(),
            vec![("Data mining", "Data mining"), ("ML", "Machine learning")]
        );
    }

    #[test]
    fn only_self_entry_without_anchors() {
        let map = build_mention_map(&page("Water", &[]));
        assert_eq!(map.entries(), vec![("Water", "Water")]);
        assert_eq!(map.max_mention_len(), 5);
    }

    #[test]
    fn first_occurrence_wins() {
        let map = build_mention_map(&page("P", &[("ML", "A"), ("ML", "B"), ("ML", "A")]));
        assert_eq!(map.get("ML"), Some("A"));
        assert_eq!(map.collisions(), 1);
    }

    #[test]
    fn disambiguated_title_surface() {
        let map = MentionMap::new("Mercury (planet)");
        assert_eq!(map.get("Mercury"), Some("Mercury (planet)"));
        assert_eq!(map.get("Mercury (planet)"), Some("Mercury (planet)"));
    }

    #[test]
    fn first_character_folding_only() {
        let map = build_mention_map(&page("P", &[("machine learning", "Machine learning"), ("IT", "Information technology")]));
        assert_eq!(map.lookup("Machine learning"), Some("Machine learning"));
        assert_eq!(map.lookup("MACHINE LEARNING"), None);
        assert_eq!(map.lookup("it"), None);
        assert_eq!(map.lookup("data mining"), None);
        assert_eq!(MentionMap::new("Deep learning").lookup("deep learning"), Some("Deep learning"));
    }
}
