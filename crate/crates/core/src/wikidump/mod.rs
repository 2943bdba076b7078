//! Reading MediaWiki XML exports and reducing wikitext to plain prose.
//!
//! [`stream_pages`] walks a dump one `<page>` at a time and yields article
//! pages. [`strip_wikitext`] turns the markup of one page into plain text
//! while keeping the internal links as [`LinkAnchor`]s whose byte offsets
//! point into the returned text.

mod stream;
mod strip;

use serde::{Deserialize, Serialize};

pub use stream::{stream_pages, DumpError, PageStream, SkipTally};
pub(crate) use strip::strip_disambiguator;
pub use strip::{canonicalize_title, strip_wikitext, StripWarning, Stripped, WarningKind};

/// A page as it appears in the dump, markup untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPage {
    pub title: String,
    pub page_id: u64,
    pub markup: String,
    pub namespace: i32,
}

/// An internal link that survived stripping.
///
/// `plain_text[byte_start..byte_end] == mention` always holds for the text
/// the anchor was produced with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkAnchor {
    pub mention: String,
    pub target: String,
    #[serde(rename = "start")]
    pub byte_start: usize,
    #[serde(rename = "end")]
    pub byte_end: usize,
}

/// A page after markup stripping. Anchors are sorted and never overlap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanPage {
    pub title: String,
    pub page_id: u64,
    pub plain_text: String,
    pub anchors: Vec<LinkAnchor>,
}

impl CleanPage {
    /// Strips `page` and returns the clean page together with any recovery
    /// warnings the stripper raised.
    pub fn from_raw(page: &RawPage) -> (CleanPage, Vec<StripWarning>) {
        let Stripped {
            plain_text,
            anchors,
            warnings,
        } = strip_wikitext(&page.markup);
        let clean = CleanPage {
            title: page.title.clone(),
            page_id: page.page_id,
            plain_text,
            anchors,
        };
        (clean, warnings)
    }
}
