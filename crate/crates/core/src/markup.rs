//! Best-effort wikitext markup removal.
//!
//! Off by default: article text normally passes through the pipeline as raw
//! wikitext. When enabled this strips template calls, tables, refs, link
//! syntax, and HTML-ish tags while keeping visible text. It does not expand
//! templates or render anything.

/// Strips common wikitext constructs, keeping display text.
pub fn strip_markup(text: &str) -> String {
    let text = strip_comments(text);
    let text = strip_ref_tags(&text);
    let text = strip_braces(&text, "{{", "}}");
    let text = strip_braces(&text, "{|", "|}");
    let text = rewrite_links(&text);
    let text = strip_tags_and_quotes(&text);
    collapse_blank_lines(&text)
}

fn strip_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("<!--") {
        out.push_str(&rest[..start]);
        match rest[start..].find("-->") {
            Some(end) => rest = &rest[start + end + 3..],
            None => return out,
        }
    }
    out.push_str(rest);
    out
}

fn strip_ref_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    loop {
        let Some(start) = find_ref_open(rest) else {
            out.push_str(rest);
            return out;
        };
        out.push_str(&rest[..start]);
        let tail = &rest[start..];
        let Some(open_end) = tail.find('>') else {
            return out;
        };
        if tail[..open_end].ends_with('/') {
            // Self-closing <ref name="x"/>.
            rest = &tail[open_end + 1..];
        } else {
            match tail.find("</ref>") {
                Some(close) => rest = &tail[close + 6..],
                None => return out,
            }
        }
    }
}

fn find_ref_open(text: &str) -> Option<usize> {
    let mut from = 0;
    while let Some(pos) = text[from..].find("<ref") {
        let abs = from + pos;
        // Must be "<ref>", "<ref ", or "<ref/"; not e.g. "<reform".
        match text[abs + 4..].chars().next() {
            Some('>') | Some(' ') | Some('/') => return Some(abs),
            _ => from = abs + 4,
        }
    }
    None
}

/// Removes balanced `open`...`close` regions, handling nesting.
fn strip_braces(text: &str, open: &str, close: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut depth = 0usize;
    let mut i = 0;
    let bytes = text.as_bytes();
    while i < bytes.len() {
        if text[i..].starts_with(open) {
            depth += 1;
            i += open.len();
        } else if depth > 0 && text[i..].starts_with(close) {
            depth -= 1;
            i += close.len();
        } else {
            let ch = text[i..].chars().next().unwrap();
            if depth == 0 {
                out.push(ch);
            }
            i += ch.len_utf8();
        }
    }
    out
}

/// `[[a|b]]` -> `b`, `[[a]]` -> `a`, media/category links dropped,
/// `[url label]` -> `label`, bare `[url]` dropped.
fn rewrite_links(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    loop {
        let internal = rest.find("[[");
        let external = rest.find('[').filter(|&p| !rest[p..].starts_with("[["));
        if let Some(i) = internal.filter(|&i| external.is_none_or(|e| i <= e)) {
            out.push_str(&rest[..i]);
            match find_balanced(&rest[i..], "[[", "]]") {
                Some(end) => {
                    let inner = &rest[i + 2..i + end];
                    out.push_str(&internal_link_text(inner));
                    rest = &rest[i + end + 2..];
                }
                None => {
                    out.push_str(&rest[i..]);
                    return out;
                }
            }
        } else if let Some(e) = external {
            out.push_str(&rest[..e]);
            match rest[e..].find(']') {
                Some(end) => {
                    let inner = &rest[e + 1..e + end];
                    if let Some(space) = inner.find(' ') {
                        out.push_str(&inner[space + 1..]);
                    }
                    rest = &rest[e + end + 1..];
                }
                None => {
                    out.push_str(&rest[e..]);
                    return out;
                }
            }
        } else {
            out.push_str(rest);
            return out;
        }
    }
}

/// Offset of the matching `close` for the `open` at position 0.
fn find_balanced(text: &str, open: &str, close: &str) -> Option<usize> {
    let mut depth = 0usize;
    let mut i = 0;
    while i < text.len() {
        if text[i..].starts_with(open) {
            depth += 1;
            i += open.len();
        } else if text[i..].starts_with(close) {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
            i += close.len();
        } else {
            i += text[i..].chars().next().unwrap().len_utf8();
        }
    }
    None
}

fn internal_link_text(inner: &str) -> String {
    let target = inner.split('|').next().unwrap_or("");
    let lowered = target.to_lowercase();
    for prefix in ["file:", "image:", "category:", "media:"] {
        if lowered.starts_with(prefix) {
            return String::new();
        }
    }
    match inner.rsplit('|').next() {
        Some(label) => label.to_string(),
        None => inner.to_string(),
    }
}

fn strip_tags_and_quotes(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let line = line.trim_start_matches(['*', '#', ':', ';']);
        let line = line.trim_matches('=');
        let mut in_tag = false;
        for ch in line.chars() {
            match ch {
                '<' => in_tag = true,
                '>' if in_tag => in_tag = false,
                _ if !in_tag => out.push(ch),
                _ => {}
            }
        }
        out.push('\n');
    }
    out.replace("'''", "").replace("''", "")
}

fn collapse_blank_lines(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut blank_run = 0;
    for line in text.lines() {
        if line.trim().is_empty() {
            blank_run += 1;
            if blank_run > 1 {
                continue;
            }
        } else {
            blank_run = 0;
        }
        out.push_str(line);
        out.push('\n');
    }
    out.trim_end().to_string()
}
