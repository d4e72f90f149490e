//! Reader and writer for the CoNLL-2012 coreference column format.
//!
//! Only the document id (column 0), the word (column 3) and the coreference
//! field (last column) are required. The POS tag (column 4) is read when a
//! line has at least six columns, and the named-entity bracket column
//! (column 10) when it has at least twelve. Dependency structure is not part
//! of the format, so every token read from CoNLL is a sentence root.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::model::{Chain, Document, EntityType, Mention, NerSpan, Token};

const MIN_COLUMNS: usize = 4;
const POS_COLUMN: usize = 4;
const NE_COLUMN: usize = 10;

struct DocBuilder {
    doc_id: String,
    part: u32,
    tokens: Vec<Token>,
    ner: Vec<NerSpan>,
    sentence: usize,
    sentence_open: bool,
    /// chain id -> (start token, line) of the pending open marker
    open: HashMap<u64, (usize, usize)>,
    /// chain id -> mentions with the line they started on
    mentions: BTreeMap<u64, Vec<(Mention, usize)>>,
    open_ne: Option<(EntityType, usize)>,
}

impl DocBuilder {
    fn new(header: &str) -> Self {
        let (doc_id, part) = parse_header(header);
        DocBuilder {
            doc_id,
            part,
            tokens: Vec::new(),
            ner: Vec::new(),
            sentence: 0,
            sentence_open: false,
            open: HashMap::new(),
            mentions: BTreeMap::new(),
            open_ne: None,
        }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Conll {
            doc: self.doc_id.clone(),
            line,
            msg: msg.into(),
        }
    }

    fn end_sentence(&mut self) {
        if self.sentence_open {
            self.sentence += 1;
            self.sentence_open = false;
        }
    }

    fn push_token(&mut self, line: usize, columns: &[&str]) -> Result<()> {
        if columns.len() < MIN_COLUMNS {
            return Err(self.err(
                line,
                format!("expected at least {MIN_COLUMNS} columns, found {}", columns.len()),
            ));
        }
        let index = self.tokens.len();
        let mut token = Token::new(columns[3], self.sentence);
        if columns.len() >= 6 && columns[POS_COLUMN] != "-" {
            token.pos = columns[POS_COLUMN].to_owned();
        }
        self.tokens.push(token);
        self.sentence_open = true;

        if columns.len() >= 12 {
            self.read_ne(line, index, columns[NE_COLUMN])?;
        }
        self.read_coref(line, index, columns[columns.len() - 1])
    }

    fn read_ne(&mut self, line: usize, index: usize, field: &str) -> Result<()> {
        if field == "*" || field == "-" {
            return Ok(());
        }
        let opens = field.starts_with('(');
        let closes = field.ends_with(')');
        if opens {
            if self.open_ne.is_some() {
                return Err(self.err(line, format!("named entity opened inside another: {field}")));
            }
            let label: String = field[1..]
                .chars()
                .take_while(|&c| c != '*' && c != ')')
                .collect();
            if label.is_empty() {
                return Err(self.err(line, format!("named entity without label: {field}")));
            }
            self.open_ne = Some((label.parse().unwrap_or_else(|e| match e {}), index));
        }
        if closes {
            match self.open_ne.take() {
                Some((entity_type, start)) => self.ner.push(NerSpan::new(entity_type, start, index + 1)),
                None => return Err(self.err(line, format!("named entity closed without open: {field}"))),
            }
        }
        if !opens && !closes {
            return Err(self.err(line, format!("malformed named-entity field {field:?}")));
        }
        Ok(())
    }

    fn read_coref(&mut self, line: usize, index: usize, field: &str) -> Result<()> {
        if field == "-" {
            return Ok(());
        }
        for item in field.split('|') {
            let (opens, closes) = (item.starts_with('('), item.ends_with(')'));
            let digits = item.trim_start_matches('(').trim_end_matches(')');
            let id: u64 = digits
                .parse()
                .map_err(|_| self.err(line, format!("malformed coreference item {item:?}")))?;
            if item.len() != digits.len() + usize::from(opens) + usize::from(closes)
                || (!opens && !closes)
            {
                return Err(self.err(line, format!("malformed coreference item {item:?}")));
            }
            if opens {
                if self.open.contains_key(&id) {
                    return Err(self.err(line, format!("chain {id} opened while already open")));
                }
                if closes {
                    self.add_mention(id, Mention::new(index, index + 1), line);
                } else {
                    self.open.insert(id, (index, line));
                }
            } else {
                match self.open.remove(&id) {
                    Some((start, start_line)) => {
                        self.add_mention(id, Mention::new(start, index + 1), start_line)
                    }
                    None => return Err(self.err(line, format!("chain {id} closed without open"))),
                }
            }
        }
        Ok(())
    }

    fn add_mention(&mut self, id: u64, mention: Mention, line: usize) {
        self.mentions.entry(id).or_default().push((mention, line));
    }

    fn finish(self, line: usize) -> Result<Document> {
        if let Some((&id, &(_, open_line))) = self.open.iter().min_by_key(|(_, &(_, l))| l) {
            return Err(self.err(open_line, format!("chain {id} never closed")));
        }
        if self.open_ne.is_some() {
            return Err(self.err(line, "named entity never closed"));
        }
        let mut chains = Vec::with_capacity(self.mentions.len());
        for (id, mut mentions) in self.mentions.iter().map(|(id, m)| (*id, m.clone())) {
            mentions.sort();
            for pair in mentions.windows(2) {
                if pair[0].0.overlaps(&pair[1].0) {
                    return Err(self.err(
                        pair[1].1,
                        format!("overlapping mentions {} and {} in chain {id}", pair[0].0, pair[1].0),
                    ));
                }
            }
            chains.push(Chain::new(id, mentions.into_iter().map(|(m, _)| m)));
        }
        Ok(Document {
            doc_id: self.doc_id,
            part: self.part,
            tokens: self.tokens,
            ner: self.ner,
            chains,
        })
    }
}

/// Splits `(name); part 003` into its name and part number. Headers in any
/// other shape are taken verbatim as the id.
fn parse_header(header: &str) -> (String, u32) {
    let header = header.trim();
    if let Some(rest) = header.strip_prefix('(') {
        if let Some((name, part)) = rest.rsplit_once("); part ") {
            if let Ok(part) = part.trim().parse() {
                return (name.to_owned(), part);
            }
        }
    }
    (header.to_owned(), 0)
}

/// Parses every document in a CoNLL-2012 file.
pub fn parse_conll(text: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut current: Option<DocBuilder> = None;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let trimmed = raw.trim();
        if let Some(header) = trimmed.strip_prefix("#begin document") {
            if let Some(doc) = &current {
                return Err(doc.err(line, "#begin document before #end document"));
            }
            current = Some(DocBuilder::new(header));
        } else if trimmed.starts_with("#end document") {
            match current.take() {
                Some(doc) => docs.push(doc.finish(line)?),
                None => {
                    return Err(Error::Conll {
                        doc: String::new(),
                        line,
                        msg: "#end document without #begin document".into(),
                    })
                }
            }
        } else if trimmed.starts_with('#') {
            continue;
        } else if trimmed.is_empty() {
            if let Some(doc) = current.as_mut() {
                doc.end_sentence();
            }
        } else {
            let columns: Vec<&str> = trimmed.split_whitespace().collect();
            match current.as_mut() {
                Some(doc) => doc.push_token(line, &columns)?,
                None => {
                    return Err(Error::Conll {
                        doc: String::new(),
                        line,
                        msg: "token line outside a document".into(),
                    })
                }
            }
        }
    }
    if let Some(doc) = current {
        return Err(doc.err(last_line, "missing #end document"));
    }
    Ok(docs)
}

fn coref_field(doc: &Document) -> Vec<String> {
    let mut opens: Vec<Vec<(usize, u64)>> = vec![Vec::new(); doc.tokens.len()];
    let mut closes: Vec<Vec<(usize, u64)>> = vec![Vec::new(); doc.tokens.len()];
    for chain in &doc.chains {
        for m in &chain.mentions {
            opens[m.start].push((m.len(), chain.id));
            if m.len() > 1 {
                closes[m.end - 1].push((m.start, chain.id));
            }
        }
    }
    opens
        .into_iter()
        .zip(closes)
        .map(|(mut o, mut c)| {
            // longest mention opens first; innermost mention closes first
            o.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            c.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            let items: Vec<String> = o
                .iter()
                .map(|&(len, id)| if len == 1 { format!("({id})") } else { format!("({id}") })
                .chain(c.iter().map(|&(_, id)| format!("{id})")))
                .collect();
            if items.is_empty() {
                "-".to_owned()
            } else {
                items.join("|")
            }
        })
        .collect()
}

/// Named-entity bracket column. Spans overlapping an earlier (or longer)
/// span cannot be expressed in the flat bracket notation and are left out.
fn ne_field(doc: &Document) -> Vec<String> {
    let mut spans: Vec<&NerSpan> = doc.ner.iter().collect();
    spans.sort_by(|a, b| a.start.cmp(&b.start).then(b.end.cmp(&a.end)));
    let mut field = vec!["*".to_owned(); doc.tokens.len()];
    let mut covered_until = 0;
    for span in spans {
        if span.start < covered_until {
            continue;
        }
        covered_until = span.end;
        let label = span.entity_type.conll_label();
        if span.end - span.start == 1 {
            field[span.start] = format!("({label})");
        } else {
            field[span.start] = format!("({label}*");
            field[span.end - 1] = "*)".to_owned();
        }
    }
    field
}

fn column_name(doc_id: &str) -> String {
    if doc_id.is_empty() {
        "-".to_owned()
    } else {
        doc_id.split_whitespace().collect::<Vec<_>>().join("_")
    }
}

/// Writes documents in CoNLL-2012 layout (twelve columns, no predicate
/// arguments).
pub fn emit_conll(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        let name = column_name(&doc.doc_id);
        let coref = coref_field(doc);
        let ne = ne_field(doc);
        let _ = writeln!(out, "#begin document ({}); part {:03}", doc.doc_id, doc.part);
        for sentence in doc.sentences() {
            for (k, i) in sentence.clone().enumerate() {
                let token = &doc.tokens[i];
                let pos = if token.pos.is_empty() { "-" } else { &token.pos };
                let _ = writeln!(
                    out,
                    "{name}\t{}\t{k}\t{}\t{pos}\t*\t-\t-\t-\t-\t{}\t{}",
                    doc.part, token.text, ne[i], coref[i]
                );
            }
            out.push('\n');
        }
        out.push_str("#end document\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wrap(lines: &[&str]) -> String {
        let mut s = String::from("#begin document (test); part 000\n");
        for l in lines {
            s.push_str(l);
            s.push('\n');
        }
        s.push_str("#end document\n");
        s
    }

    fn spans(doc: &Document, id: u64) -> Vec<(usize, usize)> {
        doc.chain(id)
            .unwrap()
            .mentions
            .iter()
            .map(|m| (m.start, m.end))
            .collect()
    }

    #[test]
    fn minimal_open_close_pair() {
        let docs = parse_conll(&wrap(&["test 0 0 John (0", "test 0 1 Doe 0)"])).unwrap();
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].doc_id, "test");
        assert_eq!(docs[0].chains.len(), 1);
        assert_eq!(spans(&docs[0], 0), vec![(0, 2)]);
    }

    #[test]
    fn single_token_and_open_on_same_token() {
        let docs = parse_conll(&wrap(&["t 0 0 a -", "t 0 1 b (0)|(1", "t 0 2 c 1)"])).unwrap();
        assert_eq!(spans(&docs[0], 0), vec![(1, 2)]);
        assert_eq!(spans(&docs[0], 1), vec![(1, 3)]);
    }

    #[test]
    fn no_annotation() {
        let docs = parse_conll(&wrap(&["t 0 0 a -", "t 0 1 b -"])).unwrap();
        assert!(docs[0].chains.is_empty());
        assert_eq!(docs[0].tokens.len(), 2);
    }

    #[test]
    fn sentences_and_pos() {
        let docs = parse_conll(&wrap(&[
            "t 0 0 He PRP * - - - - * (0)",
            "",
            "t 0 0 Ann NNP * - - - - (PERSON) (1)",
            "t 0 1 left VBD * - - - - * -",
        ]))
        .unwrap();
        let d = &docs[0];
        assert_eq!(d.sentences(), vec![0..1, 1..3]);
        assert_eq!(d.tokens[0].pos, "PRP");
        assert_eq!(d.ner, vec![NerSpan::new(EntityType::Per, 1, 2)]);
    }

    #[test]
    fn unclosed_marker_names_doc_and_line() {
        let err = parse_conll(&wrap(&["t 0 0 a -", "t 0 1 b (3"])).unwrap_err();
        match err {
            Error::Conll { doc, line, .. } => {
                assert_eq!(doc, "test");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn close_without_open() {
        let err = parse_conll(&wrap(&["t 0 0 a 4)"])).unwrap_err();
        assert!(matches!(err, Error::Conll { line: 2, .. }), "{err}");
    }

    #[test]
    fn too_few_columns() {
        let err = parse_conll(&wrap(&["t 0 a"])).unwrap_err();
        assert!(err.to_string().contains("at least 4 columns"), "{err}");
    }

    #[test]
    fn same_chain_overlap_rejected() {
        assert!(parse_conll(&wrap(&["t 0 0 a (0", "t 0 1 b (0)", "t 0 2 c 0)"])).is_err());
        assert!(parse_conll(&wrap(&["t 0 0 a (0", "t 0 1 b 0)|(0", "t 0 2 c 0)"])).is_err());
    }

    #[test]
    fn different_chains_may_cross() {
        let docs = parse_conll(&wrap(&["t 0 0 a (0", "t 0 1 b (1", "t 0 2 c 0)", "t 0 3 d 1)"])).unwrap();
        assert_eq!(spans(&docs[0], 0), vec![(0, 3)]);
        assert_eq!(spans(&docs[0], 1), vec![(1, 4)]);
    }

    #[test]
    fn emit_single_chain() {
        let mut d = Document::new("x", vec![Token::new("John", 0), Token::new("Doe", 0)]);
        d.chains = vec![Chain::new(0, [Mention::new(0, 2)])];
        let out = emit_conll(&[d]);
        let fields: Vec<&str> = out
            .lines()
            .filter(|l| !l.starts_with('#') && !l.is_empty())
            .map(|l| l.rsplit('\t').next().unwrap())
            .collect();
        assert_eq!(fields, vec!["(0", "0)"]);
    }

    #[test]
    fn emit_longest_first() {
        let tokens = (0..3).map(|i| Token::new(format!("w{i}"), 0)).collect();
        let mut d = Document::new("x", tokens);
        d.chains = vec![
            Chain::new(0, [Mention::new(0, 1)]),
            Chain::new(1, [Mention::new(0, 3)]),
        ];
        let out = emit_conll(std::slice::from_ref(&d));
        let first = out.lines().nth(1).unwrap();
        assert!(first.ends_with("\t(1|(0)"), "{first}");
        let back = parse_conll(&out).unwrap();
        assert_eq!(back[0].chains, d.chains);
    }

    #[test]
    fn header_with_part() {
        assert_eq!(parse_header(" (bc/cnn/00/cnn_0003); part 002"), ("bc/cnn/00/cnn_0003".into(), 2));
        assert_eq!(parse_header("plain"), ("plain".into(), 0));
    }
}
