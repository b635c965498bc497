//! Profile file formats: PrefLib-style strict-order-complete (SOC) documents
//! and a flat CSV companion.
//!
//! The SOC layout written here is, byte for byte:
//!
//! ```text
//! # NUMBER ALTERNATIVES: <n>
//! # NUMBER VOTERS: <m>
//! # NUMBER UNIQUE ORDERS: <u>
//! <multiplicity>: <c1>,<c2>,...,<cn>
//! ```
//!
//! with LF line endings and body lines sorted by descending multiplicity,
//! ties broken by ascending rank index, so identical profiles always
//! serialize identically. The reader tolerates extra `#`-prefixed comment
//! lines before and between the required headers.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::combinatorics::rank;
use crate::domain::{Profile, Vote};
use crate::Error;

const H_ALTERNATIVES: &str = "# NUMBER ALTERNATIVES:";
const H_VOTERS: &str = "# NUMBER VOTERS:";
const H_UNIQUE: &str = "# NUMBER UNIQUE ORDERS:";

/// Profile entries in canonical output order: descending multiplicity, ties
/// by ascending rank index. Votes without a rank (not single-peaked, or too
/// many candidates for the packed code) sort after the ranked ones, ordered
/// by their ranking sequence.
pub fn canonical_entries(profile: &Profile) -> Vec<(u64, &Vote)> {
    let mut entries: Vec<(u64, &Vote)> = profile.iter().map(|(v, m)| (m, v)).collect();
    entries.sort_by(|(ma, va), (mb, vb)| mb.cmp(ma).then_with(|| vote_order(va, vb)));
    entries
}

fn vote_order(a: &Vote, b: &Vote) -> Ordering {
    match (rank(a), rank(b)) {
        (Ok(ra), Ok(rb)) => ra.cmp(&rb),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.ranking().cmp(b.ranking()),
    }
}

/// Serializes `profile` as a SOC document; returns the bytes written.
pub fn write_soc<W: Write + ?Sized>(profile: &Profile, writer: &mut W) -> Result<u64, Error> {
    let mut out = String::new();
    writeln!(out, "{H_ALTERNATIVES} {}", profile.n()).unwrap();
    writeln!(out, "{H_VOTERS} {}", profile.voters()).unwrap();
    writeln!(out, "{H_UNIQUE} {}", profile.unique_orders()).unwrap();
    for (multiplicity, vote) in canonical_entries(profile) {
        write!(out, "{multiplicity}: ").unwrap();
        for (i, c) in vote.ranking().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{c}").unwrap();
        }
        out.push('\n');
    }
    writer.write_all(out.as_bytes())?;
    Ok(out.len() as u64)
}

/// One vote string per line, repeated per multiplicity, no header; the
/// simplest interchange for plotting tools. Returns the bytes written.
pub fn write_csv<W: Write + ?Sized>(profile: &Profile, writer: &mut W) -> Result<u64, Error> {
    let mut bytes = 0u64;
    for (multiplicity, vote) in canonical_entries(profile) {
        let line = format!("{vote}\n");
        for _ in 0..multiplicity {
            writer.write_all(line.as_bytes())?;
            bytes += line.len() as u64;
        }
    }
    Ok(bytes)
}

/// Parses a SOC document back into a profile, validating every ranking and
/// the header/body consistency.
pub fn read_soc<R: BufRead>(reader: R) -> Result<Profile, Error> {
    let mut lines = reader.lines().enumerate();

    let mut headers = [0u64; 3];
    let names = [H_ALTERNATIVES, H_VOTERS, H_UNIQUE];
    let mut found = 0usize;
    let mut line_no = 0usize;
    while found < 3 {
        let Some((i, line)) = lines.next() else {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("missing {:?} header", names[found]),
            });
        };
        let line = line?;
        line_no = i + 1;
        let trimmed = line.trim_end();
        if let Some(rest) = trimmed.strip_prefix(names[found]) {
            headers[found] = rest.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad number in {:?} header", names[found]),
            })?;
            found += 1;
        } else if trimmed.starts_with('#') {
            // Unrecognized comment lines are allowed around the headers.
            continue;
        } else {
            // Body reached before every required header appeared.
            return Err(Error::Parse {
                line: line_no,
                msg: format!("missing {:?} header", names[found]),
            });
        }
    }

    let [alternatives, voters, unique_orders] = headers;
    let n = u32::try_from(alternatives).map_err(|_| Error::Parse {
        line: line_no,
        msg: format!("alternative count {alternatives} out of range"),
    })?;
    let mut profile = Profile::new(n)?;

    let mut body_lines = 0u64;
    for (i, line) in lines {
        let line = line?;
        let line_no = i + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let (mult_text, ranking_text) = line.split_once(':').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: "expected '<multiplicity>: <c1>,<c2>,...'".into(),
        })?;
        let multiplicity: u64 = mult_text.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad multiplicity {:?}", mult_text.trim()),
        })?;
        let mut ranking = Vec::new();
        for token in ranking_text.split(',') {
            let token = token.trim();
            let id: u32 = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad candidate id {token:?}"),
            })?;
            ranking.push(id);
        }
        profile.add(Vote::new(ranking)?, multiplicity)?;
        body_lines += 1;
    }

    if body_lines != unique_orders {
        return Err(Error::Inconsistent(format!(
            "header declares {unique_orders} unique orders, body has {body_lines}"
        )));
    }
    if profile.voters() != voters {
        return Err(Error::Inconsistent(format!(
            "header declares {voters} voters, body sums to {}",
            profile.voters()
        )));
    }
    Ok(profile)
}
