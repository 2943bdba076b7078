use std::io::BufRead;

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::Serialize;
use thiserror::Error;

use super::RawPage;

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("malformed XML at byte {offset}: {source}")]
    Xml {
        offset: u64,
        #[source]
        source: quick_xml::Error,
    },
    #[error("malformed page at byte {offset}: {reason}")]
    Page { offset: u64, reason: String },
}

/// Pages seen in the dump that were not yielded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SkipTally {
    pub redirect: u64,
    pub non_article: u64,
}

impl SkipTally {
    pub fn total(&self) -> u64 {
        self.redirect + self.non_article
    }
}

/// Lazy iterator over the article pages of a MediaWiki XML export.
///
/// Only one `<page>` is held in memory at a time. Redirects and pages outside
/// namespace 0 are skipped and counted in [`PageStream::skipped`]. After the
/// first error the stream is fused.
pub struct PageStream<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    skipped: SkipTally,
    seen: u64,
    done: bool,
}

pub fn stream_pages<R: BufRead>(source: R) -> PageStream<R> {
    PageStream {
        reader: Reader::from_reader(source),
        buf: Vec::with_capacity(64 * 1024),
        skipped: SkipTally::default(),
        seen: 0,
        done: false,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    None,
    Title,
    Ns,
    PageId,
    Text,
}

#[derive(Default)]
struct PageBuilder {
    title: String,
    ns: String,
    id: String,
    text: String,
    redirect: bool,
}

impl<R: BufRead> PageStream<R> {
    pub fn skipped(&self) -> SkipTally {
        self.skipped
    }

    /// Number of `<page>` elements read so far, yielded or skipped.
    pub fn pages_seen(&self) -> u64 {
        self.seen
    }

    fn xml_error(&self, source: quick_xml::Error) -> DumpError {
        DumpError::Xml {
            offset: self.reader.error_position(),
            source,
        }
    }

    /// Reads the body of a `<page>` whose start tag was just consumed.
    fn read_page(&mut self) -> Result<PageBuilder, DumpError> {
        let start = self.reader.buffer_position();
        let mut page = PageBuilder::default();
        // Element names below <page>, innermost last.
        let mut path: Vec<Vec<u8>> = Vec::new();
        let mut field = Field::None;
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => ev,
                Err(e) => return Err(self.xml_error(e)),
            };
            match event {
                Event::Start(e) => {
                    let name = e.local_name().as_ref().to_vec();
                    field = match (path.len(), name.as_slice()) {
                        (0, b"title") => Field::Title,
                        (0, b"ns") => Field::Ns,
                        (0, b"id") => Field::PageId,
                        (0, b"redirect") => {
                            page.redirect = true;
                            Field::None
                        }
                        (1, b"text") if path[0] == b"revision" => {
                            // Later revisions replace earlier ones.
                            page.text.clear();
                            Field::Text
                        }
                        _ => Field::None,
                    };
                    path.push(name);
                }
                Event::Empty(e) => {
                    if path.is_empty() && e.local_name().as_ref() == b"redirect" {
                        page.redirect = true;
                    }
                }
                Event::End(e) => {
                    if path.is_empty() {
                        if e.local_name().as_ref() == b"page" {
                            break;
                        }
                        return Err(DumpError::Page {
                            offset: self.reader.buffer_position(),
                            reason: "unexpected end tag inside <page>".into(),
                        });
                    }
                    path.pop();
                    field = Field::None;
                }
                Event::Text(t) => {
                    if field == Field::None {
                        continue;
                    }
                    let text = match t.unescape() {
                        Ok(s) => s,
                        Err(e) => return Err(self.xml_error(e)),
                    };
                    page.push(field, &text);
                }
                Event::CData(c) => {
                    if field == Field::None {
                        continue;
                    }
                    let text = String::from_utf8_lossy(&c).into_owned();
                    page.push(field, &text);
                }
                Event::Eof => {
                    return Err(DumpError::Page {
                        offset: start,
                        reason: "dump ended inside <page>".into(),
                    })
                }
                _ => {}
            }
        }
        Ok(page)
    }
}

impl PageBuilder {
    fn push(&mut self, field: Field, text: &str) {
        match field {
            Field::Title => self.title.push_str(text),
            Field::Ns => self.ns.push_str(text),
            Field::PageId => self.id.push_str(text),
            Field::Text => self.text.push_str(text),
            Field::None => {}
        }
    }

    fn is_redirect(&self) -> bool {
        if self.redirect {
            return true;
        }
        let head = self.text.trim_start();
        head.len() >= 9 && head.as_bytes()[..9].eq_ignore_ascii_case(b"#redirect")
    }
}

impl<R: BufRead> Iterator for PageStream<R> {
    type Item = Result<RawPage, DumpError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            let is_page = match self.reader.read_event_into(&mut self.buf) {
                Ok(Event::Start(e)) => e.local_name().as_ref() == b"page",
                Ok(Event::Eof) => {
                    self.done = true;
                    return None;
                }
                Ok(_) => false,
                Err(e) => {
                    self.done = true;
                    return Some(Err(self.xml_error(e)));
                }
            };
            if !is_page {
                continue;
            }
            let offset = self.reader.buffer_position();
            let page = match self.read_page() {
                Ok(p) => p,
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            };
            self.seen += 1;
            let namespace = match page.ns.trim() {
                "" => 0,
                ns => match ns.parse::<i32>() {
                    Ok(n) => n,
                    Err(_) => {
                        self.done = true;
                        return Some(Err(DumpError::Page {
                            offset,
                            reason: format!("invalid namespace {ns:?}"),
                        }));
                    }
                },
            };
            if namespace != 0 {
                self.skipped.non_article += 1;
                continue;
            }
            if page.is_redirect() {
                self.skipped.redirect += 1;
                continue;
            }
            let title = page.title.trim().to_string();
            if title.is_empty() {
                self.done = true;
                return Some(Err(DumpError::Page {
                    offset,
                    reason: "page has no title".into(),
                }));
            }
            let page_id = match page.id.trim().parse::<u64>() {
                Ok(id) => id,
                Err(_) => {
                    self.done = true;
                    return Some(Err(DumpError::Page {
                        offset,
                        reason: format!("invalid page id {:?} for {title:?}", page.id),
                    }));
                }
            };
            return Some(Ok(RawPage {
                title,
                page_id,
                markup: page.text,
                namespace,
            }));
        }
        None
    }
}
