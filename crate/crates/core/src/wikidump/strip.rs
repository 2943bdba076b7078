use serde::Serialize;

use super::LinkAnchor;

/// Output of [`strip_wikitext`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stripped {
    pub plain_text: String,
    pub anchors: Vec<LinkAnchor>,
    pub warnings: Vec<StripWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    UnclosedTemplate,
    UnclosedLink,
    UnclosedExternalLink,
    UnclosedTable,
    UnclosedComment,
    UnclosedTag,
    NestingTooDeep,
}

/// A recovery the stripper made; `offset` is a byte offset into the markup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StripWarning {
    pub kind: WarningKind,
    pub offset: usize,
}

/// Canonical form of a link target: fragment dropped, underscores turned into
/// spaces, whitespace collapsed, first character uppercased.
pub fn canonicalize_title(raw: &str) -> String {
    let raw = match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    };
    let mut out = String::with_capacity(raw.len());
    for word in raw
        .split(|c: char| c == '_' || c.is_whitespace())
        .filter(|w| !w.is_empty())
    {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    let mut chars = out.chars();
    match chars.next() {
        Some(first) if first.is_lowercase() => {
            let mut s: String = first.to_uppercase().collect();
            s.push_str(chars.as_str());
            s
        }
        _ => out,
    }
}

/// Reduces wikitext to plain prose.
///
/// Internal links keep their visible text and yield one anchor each.
/// Templates, references, tables, comments, file and category links,
/// headings and bold/italic quotes are removed. Unbalanced constructs are
/// kept as literal text and reported as warnings. Never panics.
pub fn strip_wikitext(markup: &str) -> Stripped {
    let mut stripper = Stripper {
        src: markup,
        out: Emitter::default(),
        anchors: Vec::new(),
        warnings: Vec::new(),
    };
    stripper.run(0, markup.len(), 0, true);
    let Stripper {
        out,
        anchors,
        warnings,
        ..
    } = stripper;
    Stripped {
        plain_text: out.text,
        anchors,
        warnings,
    }
}

const MAX_DEPTH: usize = 24;
const LINK_SCAN_LIMIT: usize = 32 * 1024;
const TEMPLATE_SCAN_LIMIT: usize = 512 * 1024;
const TAG_SCAN_LIMIT: usize = 1024;

/// Tags whose whole element, content included, is dropped.
const DROPPED_ELEMENTS: &[&str] = &[
    "ref",
    "references",
    "gallery",
    "math",
    "chem",
    "ce",
    "timeline",
    "imagemap",
    "score",
    "syntaxhighlight",
    "source",
    "graph",
    "templatedata",
    "hiero",
    "mapframe",
    "maplink",
];

/// Link prefixes that never denote an article in the main namespace.
const DROPPED_NAMESPACES: &[&str] = &["file", "image", "media", "category"];
const OTHER_NAMESPACES: &[&str] = &[
    "wikipedia",
    "wp",
    "project",
    "help",
    "template",
    "portal",
    "user",
    "talk",
    "special",
    "draft",
    "module",
    "mediawiki",
    "wiktionary",
    "wikt",
    "wikisource",
    "wikiquote",
    "wikinews",
    "wikibooks",
    "wikiversity",
    "wikivoyage",
    "wikidata",
    "commons",
    "meta",
    "species",
    "d",
    "s",
    "q",
    "n",
    "b",
    "v",
    "voy",
];

#[derive(Clone, Copy, PartialEq, Eq, Default)]
enum Gap {
    #[default]
    None,
    Space,
    Break,
}

/// Appends text while collapsing whitespace lazily, so removed markup never
/// leaves doubled spaces or blank lines behind.
#[derive(Default)]
struct Emitter {
    text: String,
    gap: Gap,
    /// Text before this offset belongs to an anchor and must not be rewritten.
    frozen: usize,
}

impl Emitter {
    fn space(&mut self) {
        if self.gap == Gap::None {
            self.gap = Gap::Space;
        }
    }

    fn line_break(&mut self) {
        self.gap = Gap::Break;
    }

    fn push_char(&mut self, c: char) {
        if c == '\n' {
            self.line_break();
            return;
        }
        if c.is_whitespace() {
            self.space();
            return;
        }
        if c == ')' && self.drop_empty_parens() {
            return;
        }
        self.flush_gap(c);
        self.text.push(c);
    }

    fn push_str(&mut self, s: &str) {
        for c in s.chars() {
            self.push_char(c);
        }
    }

    /// Pushes `s` and returns the byte span its non-space content occupies.
    fn push_span(&mut self, s: &str) -> Option<(usize, usize)> {
        let mut start = None;
        for c in s.chars() {
            let before = self.text.len();
            self.push_char(c);
            if start.is_none() && self.text.len() > before {
                start = Some(self.text.len() - c.len_utf8());
            }
        }
        start.map(|s| (s, self.text.len()))
    }

    fn flush_gap(&mut self, next: char) {
        let gap = std::mem::take(&mut self.gap);
        let Some(last) = self.text.chars().next_back() else {
            return;
        };
        match gap {
            Gap::None => {}
            Gap::Break => self.text.push('\n'),
            Gap::Space => {
                let tight_after = matches!(last, '(' | '[' | '\n');
                let tight_before = matches!(next, ',' | '.' | ';' | ':' | '!' | '?' | ')' | ']');
                if !tight_after && !tight_before {
                    self.text.push(' ');
                }
            }
        }
    }

    /// Turns `"word ("` + `")"` into `"word"` when everything between the
    /// parentheses was removed.
    fn drop_empty_parens(&mut self) -> bool {
        if !self.text.ends_with('(') || self.text.len() - 1 < self.frozen {
            return false;
        }
        self.text.pop();
        let trimmed = self.text.trim_end_matches(' ').len().max(self.frozen);
        if trimmed < self.text.len() {
            self.text.truncate(trimmed);
            self.gap = Gap::Space;
        }
        true
    }
}

struct Stripper<'a> {
    src: &'a str,
    out: Emitter,
    anchors: Vec<LinkAnchor>,
    warnings: Vec<StripWarning>,
}

fn starts_with_ci(hay: &[u8], needle: &[u8]) -> bool {
    hay.len() >= needle.len() && hay[..needle.len()].eq_ignore_ascii_case(needle)
}

fn find_ci(hay: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    if needle.is_empty() || hay.len() < needle.len() {
        return None;
    }
    (from..=hay.len() - needle.len()).find(|&i| hay[i..i + needle.len()].eq_ignore_ascii_case(needle))
}

fn find(hay: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    if from > hay.len() {
        return None;
    }
    hay[from..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + from)
}

/// Finds the `close` matching an `open` at `start`, honoring nesting.
/// Returns the offset just past the closing delimiter.
fn matching(
    b: &[u8],
    start: usize,
    end: usize,
    open: &[u8; 2],
    close: &[u8; 2],
    limit: usize,
) -> Option<usize> {
    let stop = end.min(start.saturating_add(limit));
    let mut depth = 0usize;
    let mut i = start;
    while i + 1 < stop {
        if b[i] == open[0] && b[i + 1] == open[1] {
            depth += 1;
            i += 2;
        } else if b[i] == close[0] && b[i + 1] == close[1] {
            depth -= 1;
            i += 2;
            if depth == 0 {
                return Some(i);
            }
        } else {
            i += 1;
        }
    }
    None
}

/// Finds the end of a `{| ... |}` table starting at `start`. Templates inside
/// the table are skipped whole since `{{x|}}` contains `|}`.
fn table_end(b: &[u8], start: usize, end: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut i = start;
    while i + 1 < end {
        match (b[i], b[i + 1]) {
            (b'{', b'{') => match matching(b, i, end, b"{{", b"}}", TEMPLATE_SCAN_LIMIT) {
                Some(j) => i = j,
                None => i += 2,
            },
            (b'{', b'|') => {
                depth += 1;
                i += 2;
            }
            (b'|', b'}') => {
                depth -= 1;
                i += 2;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => i += 1,
        }
    }
    None
}

fn is_url_start(b: &[u8]) -> bool {
    ["http://", "https://", "ftp://", "//", "mailto:", "news:", "irc://"]
        .iter()
        .any(|p| starts_with_ci(b, p.as_bytes()))
}

fn decode_entity(s: &str) -> Option<(char, usize)> {
    let end = s.as_bytes().iter().take(12).position(|&c| c == b';')?;
    let name = &s[1..end];
    let c = match name {
        "nbsp" | "ensp" | "emsp" | "thinsp" => ' ',
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "ndash" => '\u{2013}',
        "mdash" => '\u{2014}',
        "minus" => '\u{2212}',
        "times" => '\u{d7}',
        "hellip" => '\u{2026}',
        _ => {
            let num = name.strip_prefix('#')?;
            let code = match num.strip_prefix(['x', 'X']) {
                Some(hex) => u32::from_str_radix(hex, 16).ok()?,
                None => num.parse().ok()?,
            };
            char::from_u32(code)?
        }
    };
    Some((c, end + 1))
}

impl<'a> Stripper<'a> {
    fn warn(&mut self, kind: WarningKind, offset: usize) {
        self.warnings.push(StripWarning { kind, offset });
    }

    fn line_start(&self, i: usize, from: usize) -> bool {
        i == from || self.src.as_bytes()[i - 1] == b'\n'
    }

    /// Processes `src[from..to]` into the emitter.
    fn run(&mut self, from: usize, to: usize, depth: usize, anchors: bool) {
        let src = self.src;
        let b = src.as_bytes();
        let mut i = from;
        while i < to {
            if depth == 0 && self.line_start(i, from) {
                if let Some(next) = self.line_prefix(i, to) {
                    i = next;
                    continue;
                }
            }
            let c = b[i];
            let next = match c {
                b'<' => self.tag(i, to, depth),
                b'{' => self.brace(i, to),
                b'[' => self.bracket(i, to, depth, anchors),
                b'\'' => {
                    let n = b[i..to].iter().take_while(|&&q| q == b'\'').count();
                    if n >= 2 {
                        Some(i + n)
                    } else {
                        None
                    }
                }
                b'&' => decode_entity(&src[i..to]).map(|(ch, len)| {
                    self.out.push_char(ch);
                    i + len
                }),
                b'_' => self.magic_word(i, to),
                b'\n' => {
                    self.out.line_break();
                    Some(i + 1)
                }
                _ => None,
            };
            i = match next {
                Some(n) => n,
                None => {
                    // Copy a run of ordinary text up to the next special byte.
                    let run_end = b[i + 1..to]
                        .iter()
                        .position(|c| matches!(c, b'<' | b'{' | b'[' | b'\'' | b'&' | b'_' | b'\n'))
                        .map_or(to, |p| p + i + 1);
                    self.out.push_str(&src[i..run_end]);
                    run_end
                }
            };
        }
    }

    /// Handles constructs only recognised at the start of a line. Returns
    /// the offset to continue from when the line prefix was consumed.
    fn line_prefix(&mut self, i: usize, to: usize) -> Option<usize> {
        let b = self.src.as_bytes();
        let line_end = b[i..to].iter().position(|&c| c == b'\n').map_or(to, |p| p + i);
        let line = self.src[i..line_end].trim_end();
        if line.len() >= 2 && line.starts_with('=') && line.ends_with('=') {
            self.out.line_break();
            return Some(line_end);
        }
        match b[i] {
            b'*' | b'#' | b':' | b';' => {
                let n = b[i..line_end]
                    .iter()
                    .take_while(|c| matches!(c, b'*' | b'#' | b':' | b';'))
                    .count();
                self.out.line_break();
                Some(i + n)
            }
            // Stray table rows whose opening `{|` was lost.
            b'|' | b'!' if line_end > i + 1 => {
                self.out.line_break();
                Some(line_end)
            }
            b'-' if line.len() >= 4 && line.bytes().all(|c| c == b'-') => Some(line_end),
            _ => None,
        }
    }

    fn magic_word(&mut self, i: usize, to: usize) -> Option<usize> {
        let b = self.src.as_bytes();
        if !b[i..to].starts_with(b"__") {
            return None;
        }
        let name_len = b[i + 2..to].iter().take_while(|c| c.is_ascii_uppercase()).count();
        let end = i + 2 + name_len;
        (name_len > 0 && b[end..to].starts_with(b"__")).then_some(end + 2)
    }

    fn brace(&mut self, i: usize, to: usize) -> Option<usize> {
        let b = self.src.as_bytes();
        match b.get(i + 1) {
            Some(b'{') if i + 1 < to => match matching(b, i, to, b"{{", b"}}", TEMPLATE_SCAN_LIMIT) {
                Some(end) => Some(end),
                None => {
                    self.warn(WarningKind::UnclosedTemplate, i);
                    self.out.push_str("{{");
                    Some(i + 2)
                }
            },
            Some(b'|') if i + 1 < to => match table_end(b, i, to) {
                Some(end) => {
                    self.out.line_break();
                    Some(end)
                }
                None => {
                    self.warn(WarningKind::UnclosedTable, i);
                    self.out.push_str("{|");
                    Some(i + 2)
                }
            },
            _ => None,
        }
    }

    fn tag(&mut self, i: usize, to: usize, depth: usize) -> Option<usize> {
        let b = self.src.as_bytes();
        if b[i..to].starts_with(b"<!--") {
            return match find(&b[..to], b"-->", i + 4) {
                Some(end) => Some(end + 3),
                None => {
                    self.warn(WarningKind::UnclosedComment, i);
                    self.out.push_str("<!--");
                    Some(i + 4)
                }
            };
        }
        let closing = b.get(i + 1) == Some(&b'/');
        let name_start = i + 1 + usize::from(closing);
        let name_len = b[name_start.min(to)..to]
            .iter()
            .take_while(|c| c.is_ascii_alphanumeric())
            .count();
        if name_len == 0 || !b[name_start].is_ascii_alphabetic() {
            return None;
        }
        let name_end = name_start + name_len;
        let scan_to = to.min(name_end + TAG_SCAN_LIMIT);
        let gt = b[name_end..scan_to].iter().position(|&c| c == b'>' || c == b'<')?;
        let gt = name_end + gt;
        if b[gt] != b'>' {
            return None;
        }
        let tag_end = gt + 1;
        let self_closing = b[gt - 1] == b'/';
        let name = self.src[name_start..name_end].to_ascii_lowercase();

        if closing {
            return Some(tag_end);
        }
        if name == "br" || name == "hr" {
            self.out.space();
            return Some(tag_end);
        }
        let dropped = DROPPED_ELEMENTS.contains(&name.as_str());
        if self_closing || !(dropped || name == "nowiki") {
            return Some(tag_end);
        }
        let close = format!("</{name}");
        let Some(close_at) = find_ci(&b[..to], close.as_bytes(), tag_end) else {
            self.warn(WarningKind::UnclosedTag, i);
            return Some(tag_end);
        };
        let after = b[close_at..to]
            .iter()
            .position(|&c| c == b'>')
            .map_or(to, |p| close_at + p + 1);
        if name == "nowiki" {
            let inner = &self.src[tag_end..close_at];
            if depth < MAX_DEPTH {
                self.out.push_str(inner);
            }
        }
        Some(after)
    }

    fn bracket(&mut self, i: usize, to: usize, depth: usize, anchors: bool) -> Option<usize> {
        let b = self.src.as_bytes();
        if b.get(i + 1) == Some(&b'[') && i + 1 < to {
            return Some(self.internal_link(i, to, depth, anchors));
        }
        if !is_url_start(&b[i + 1..to]) {
            return None;
        }
        let Some(close) = b[i + 1..to].iter().position(|&c| c == b']' || c == b'\n') else {
            self.warn(WarningKind::UnclosedExternalLink, i);
            return None;
        };
        let close = i + 1 + close;
        if b[close] != b']' {
            self.warn(WarningKind::UnclosedExternalLink, i);
            return None;
        }
        let inner = &self.src[i + 1..close];
        if let Some(sp) = inner.find(' ') {
            let label_start = i + 1 + sp + 1;
            self.nested(label_start, close, depth, i);
        }
        Some(close + 1)
    }

    /// Runs a nested region without producing anchors.
    fn nested(&mut self, from: usize, to: usize, depth: usize, at: usize) {
        if depth >= MAX_DEPTH {
            self.warn(WarningKind::NestingTooDeep, at);
            self.out.push_str(&self.src[from..to]);
        } else {
            self.run(from, to, depth + 1, false);
        }
    }

    fn internal_link(&mut self, i: usize, to: usize, depth: usize, anchors: bool) -> usize {
        let b = self.src.as_bytes();
        let Some(end) = matching(b, i, to, b"[[", b"]]", LINK_SCAN_LIMIT) else {
            self.warn(WarningKind::UnclosedLink, i);
            self.out.push_str("[[");
            return i + 2;
        };
        let inner_start = i + 2;
        let inner_end = end - 2;
        let inner = &self.src[inner_start..inner_end];
        let (target_raw, label) = match inner.find('|') {
            Some(p) => (&inner[..p], Some((inner_start + p + 1, inner_end))),
            None => (inner, None),
        };
        let mut target = target_raw.trim();
        let mut article = true;
        if let Some(rest) = target.strip_prefix(':') {
            target = rest.trim_start();
            article = false;
        }
        if let Some(colon) = target.find(':') {
            let prefix = target[..colon].trim().to_ascii_lowercase();
            if article && DROPPED_NAMESPACES.contains(&prefix.as_str()) {
                return end;
            }
            let interlanguage = (2..=3).contains(&prefix.len())
                && prefix.bytes().all(|c| c.is_ascii_lowercase())
                && !OTHER_NAMESPACES.contains(&prefix.as_str());
            if article && interlanguage && label.is_none() {
                return end;
            }
            if interlanguage || OTHER_NAMESPACES.contains(&prefix.as_str()) {
                article = false;
            }
        }

        // Link trail: `[[bus]]es` renders as "buses".
        let trail_len = b[end..to].iter().take_while(|c| c.is_ascii_lowercase()).count();
        let trail = &self.src[end..end + trail_len];
        let resume = end + trail_len;

        let mut visible = match label {
            Some((ls, le)) if !self.src[ls..le].trim().is_empty() => {
                let mut sub = Stripper {
                    src: self.src,
                    out: Emitter::default(),
                    anchors: Vec::new(),
                    warnings: Vec::new(),
                };
                if depth >= MAX_DEPTH {
                    self.warn(WarningKind::NestingTooDeep, i);
                    sub.out.push_str(&self.src[ls..le]);
                } else {
                    sub.run(ls, le, depth + 1, false);
                }
                self.warnings.extend(sub.warnings);
                sub.out.text
            }
            // Pipe trick: `[[Mercury (planet)|]]` shows "Mercury".
            Some(_) => strip_disambiguator(target).to_string(),
            None => target.to_string(),
        };
        visible.push_str(trail);

        let canonical = canonicalize_title(target);
        let span = self.out.push_span(&visible);
        if let Some((start, stop)) = span {
            if anchors && article && !canonical.is_empty() {
                self.anchors.push(LinkAnchor {
                    mention: self.out.text[start..stop].to_string(),
                    target: canonical,
                    byte_start: start,
                    byte_end: stop,
                });
                self.out.frozen = stop;
            }
        }
        resume
    }
}

/// `"Mercury (planet)"` → `"Mercury"`.
pub(crate) fn strip_disambiguator(title: &str) -> &str {
    let t = title.trim_end();
    if t.ends_with(')') {
        if let Some(open) = t.rfind(" (") {
            let head = t[..open].trim_end();
            if !head.is_empty() {
                return head;
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anchor(mention: &str, target: &str, start: usize, end: usize) -> LinkAnchor {
        LinkAnchor {
            mention: mention.into(),
            target: target.into(),
            byte_start: start,
            byte_end: end,
        }
    }

    fn text(markup: &str) -> String {
        strip_wikitext(markup).plain_text
    }

    #[test]
    fn piped_link() {
        let s = strip_wikitext("[[machine learning|ML]] is fun");
        assert_eq!(s.plain_text, "ML is fun");
        assert_eq!(s.anchors, vec![anchor("ML", "Machine learning", 0, 2)]);
    }

    #[test]
    fn plain_link() {
        let s = strip_wikitext("[[Water]] boils.");
        assert_eq!(s.plain_text, "Water boils.");
        assert_eq!(s.anchors, vec![anchor("Water", "Water", 0, 5)]);
    }

    #[test]
    fn templates_and_refs_removed() {
        let s = strip_wikitext("{{Infobox x}}Text with <ref>cite</ref> end.");
        assert_eq!(s.plain_text, "Text with end.");
        assert!(s.anchors.is_empty());
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn canonicalization() {
        assert_eq!(canonicalize_title("water"), "Water");
        assert_eq!(canonicalize_title("carbon_dioxide#Chemistry"), "Carbon dioxide");
        assert_eq!(canonicalize_title("  new   york "), "New york");
        assert_eq!(canonicalize_title("#Section"), "");
        assert_eq!(canonicalize_title("éclair"), "Éclair");
    }

    #[test]
    fn link_trail_extends_mention() {
        let s = strip_wikitext("large [[data set]]s and [[database system]]s.");
        assert_eq!(s.plain_text, "large data sets and database systems.");
        assert_eq!(s.anchors[0].mention, "data sets");
        assert_eq!(s.anchors[0].target, "Data set");
        assert_eq!(s.anchors[1].mention, "database systems");
    }

    #[test]
    fn nested_templates_and_ref_before_punctuation() {
        assert_eq!(
            text("A {{lang|fr|{{nowrap|eau}}}} liquid<ref name=\"a\">{{cite web|url=x}}</ref>."),
            "A liquid."
        );
        assert_eq!(text("Water<ref name=x/> is wet."), "Water is wet.");
    }

    #[test]
    fn file_and_category_links_dropped() {
        let s = strip_wikitext(
            "[[File:Drop.jpg|thumb|A [[water]] drop]]Water is wet.[[Category:Liquids]]",
        );
        assert_eq!(s.plain_text, "Water is wet.");
        assert!(s.anchors.is_empty());
    }

    #[test]
    fn interlanguage_and_namespaced_links() {
        let s = strip_wikitext("See [[wikt:water|water]] here.[[fr:Eau]]");
        assert_eq!(s.plain_text, "See water here.");
        assert!(s.anchors.is_empty());
        // Titles with a colon stay articles.
        let s = strip_wikitext("[[Star Wars: A New Hope]]");
        assert_eq!(s.anchors.len(), 1);
    }

    #[test]
    fn headings_comments_quotes_tables() {
        let md = "'''Water''' is ''wet''.<!-- hidden -->\n== History ==\n{| class=\"wikitable\"\n|-\n| {{x|}} || b\n|}\nIt flows.";
        assert_eq!(text(md), "Water is wet.\nIt flows.");
    }

    #[test]
    fn external_links_keep_label_only() {
        let s = strip_wikitext("Visit [https://example.org the site] or [http://x.org].");
        assert_eq!(s.plain_text, "Visit the site or.");
        assert!(s.anchors.is_empty());
    }

    #[test]
    fn empty_parentheses_removed() {
        assert_eq!(text("Water ({{IPA|ˈwɔːtər}}) is wet."), "Water is wet.");
        assert_eq!(text("Water (H2O) is wet."), "Water (H2O) is wet.");
    }

    #[test]
    fn label_markup_and_nested_links() {
        let s = strip_wikitext("[[Water|'''liquid''' [[ice]]]] melts");
        assert_eq!(s.plain_text, "liquid ice melts");
        assert_eq!(s.anchors, vec![anchor("liquid ice", "Water", 0, 10)]);
    }

    #[test]
    fn pipe_trick() {
        let s = strip_wikitext("[[Mercury (planet)|]] orbits");
        assert_eq!(s.plain_text, "Mercury orbits");
        assert_eq!(s.anchors[0].target, "Mercury (planet)");
    }

    #[test]
    fn unbalanced_is_literal_with_warning() {
        let s = strip_wikitext("Broken [[link here and {{tpl");
        assert_eq!(s.plain_text, "Broken [[link here and {{tpl");
        let kinds: Vec<_> = s.warnings.iter().map(|w| w.kind).collect();
        assert_eq!(kinds, [WarningKind::UnclosedLink, WarningKind::UnclosedTemplate]);
    }

    #[test]
    fn entities_and_magic_words() {
        assert_eq!(text("__NOTOC__A&nbsp;B &amp; C&#233;"), "A B & Cé");
    }

    #[test]
    fn lists_lose_markers() {
        assert_eq!(text("Intro.\n* one\n** two"), "Intro.\none\ntwo");
    }

    #[test]
    fn unicode_around_links() {
        let s = strip_wikitext("«[[Zürich]]» ist schön");
        let a = &s.anchors[0];
        assert_eq!(&s.plain_text[a.byte_start..a.byte_end], "Zürich");
    }
}
