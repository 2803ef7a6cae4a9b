//! Plain-text matrix and tensor files.
//!
//! ```text
//! field gf 5          field real
//! 2 3                 3 2 2 2
//! 1 2 3               <8 entries, mode 1 fastest>
//! 4 0 1
//! ```
//!
//! A matrix file gives `<rows> <cols>` on line 2 and then one line per row.
//! A tensor file gives the number of modes followed by the mode sizes, then
//! every entry in linearization order, split across lines at will. Blank
//! lines and lines starting with `#` are ignored.

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::matrix::Matrix;
use crate::tensor::Tensor;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Numbered content lines, skipping blanks and comments.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

struct Header<'a> {
    field: FieldSpec,
    dims_line: usize,
    dims: Vec<usize>,
    rest: Vec<(usize, &'a str)>,
}

fn header(text: &str) -> Result<Header<'_>> {
    let mut lines = content_lines(text);
    let (fl, first) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let spec = first
        .strip_prefix("field")
        .ok_or_else(|| perr(fl, format!("expected `field <spec>`, found `{first}`")))?;
    let field: FieldSpec = spec.parse().map_err(|e: Error| perr(fl, e.to_string()))?;
    let (dl, dims_text) = lines.next().ok_or_else(|| perr(fl + 1, "missing dimension line"))?;
    let dims = dims_text
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| perr(dl, format!("bad dimension `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Header {
        field,
        dims_line: dl,
        dims,
        rest: lines.collect(),
    })
}

/// The field named on the first line.
pub fn peek_field(text: &str) -> Result<FieldSpec> {
    Ok(header(text)?.field)
}

fn check_field<F: Field>(field: &F, found: FieldSpec) -> Result<()> {
    let want = field.spec();
    if std::mem::discriminant(&want) != std::mem::discriminant(&found) || (want.is_exact() && want != found) {
        return Err(perr(1, format!("file is over {found}, expected {want}")));
    }
    Ok(())
}

fn parse_scalar<F: Field>(field: &F, line: usize, tok: &str) -> Result<F::Elem> {
    field
        .parse_elem(tok)
        .map_err(|e| perr(line, format!("bad scalar `{tok}`: {e}")))
}

pub fn parse_matrix<F: Field>(field: &F, text: &str) -> Result<Matrix<F>> {
    let h = header(text)?;
    check_field(field, h.field)?;
    let [m, n] = h.dims[..] else {
        return Err(perr(h.dims_line, "matrix dimension line must be `<rows> <cols>`"));
    };
    if h.rest.len() != m && !(m * n == 0 && h.rest.is_empty()) {
        let line = h.rest.get(m).map_or(h.dims_line + 1, |(l, _)| *l);
        return Err(perr(line, format!("expected {m} rows, found {}", h.rest.len())));
    }
    let mut data = Vec::with_capacity(m * n);
    for (line, row) in &h.rest {
        let toks: Vec<&str> = row.split_whitespace().collect();
        if toks.len() != n {
            return Err(perr(*line, format!("expected {n} entries, found {}", toks.len())));
        }
        for t in toks {
            data.push(parse_scalar(field, *line, t)?);
        }
    }
    Matrix::new(field, m, n, data)
}

pub fn parse_tensor<F: Field>(field: &F, text: &str) -> Result<Tensor<F>> {
    let h = header(text)?;
    check_field(field, h.field)?;
    let (&order, shape) = h
        .dims
        .split_first()
        .ok_or_else(|| perr(h.dims_line, "tensor dimension line must be `n d_1 .. d_n`"))?;
    if order == 0 || shape.len() != order {
        return Err(perr(
            h.dims_line,
            format!("declared {order} modes but gave {} sizes", shape.len()),
        ));
    }
    let len: usize = shape.iter().product();
    let mut data = Vec::with_capacity(len);
    let mut last = h.dims_line;
    for (line, row) in &h.rest {
        last = *line;
        for t in row.split_whitespace() {
            if data.len() == len {
                return Err(perr(*line, format!("more than {len} entries")));
            }
            data.push(parse_scalar(field, *line, t)?);
        }
    }
    if data.len() != len {
        return Err(perr(last, format!("expected {len} entries, found {}", data.len())));
    }
    Tensor::new(field, shape.to_vec(), data)
}

pub fn write_matrix<F: Field>(m: &Matrix<F>) -> String {
    let mut out = format!("field {}\n{} {}\n", m.field().spec(), m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|a| m.field().format_elem(a)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Writes one mode-1 fiber per line.
pub fn write_tensor<F: Field>(t: &Tensor<F>) -> String {
    let dims: Vec<String> = t.shape().iter().map(|d| d.to_string()).collect();
    let mut out = format!("field {}\n{} {}\n", t.field().spec(), t.order(), dims.join(" "));
    let width = t.shape()[0].max(1);
    for chunk in t.data().chunks(width) {
        let row: Vec<String> = chunk.iter().map(|a| t.field().format_elem(a)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
