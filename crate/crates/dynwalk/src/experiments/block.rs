//! Mixed fourth moment `E{Y(I)²Y(J)²}` of rescaled-field block increments
//! over neighboring block pairs, against `10·|I|·|J|`.

use dynwalk_core::clocks::sample_clocks;
use dynwalk_core::rng::PathSeeds;
use dynwalk_core::walk::{block_increment, neighboring, rescaled_field, Block};
use serde::{Deserialize, Serialize};

use super::{invalid, mean_se, moment_row, pass_if};
use crate::parallel::Runner;
use crate::report::{CsvRow, Tabular};
use crate::{Error, Result};

/// Moment constant for neighboring blocks.
pub const MOMENT_CONSTANT: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockConfig {
    pub n: usize,
    pub pairs: Vec<(Block, Block)>,
    pub reps: u64,
    pub seed: u64,
}

impl Default for BlockConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            pairs: default_block_pairs(),
            reps: 10_000,
            seed: 42,
        }
    }
}

impl BlockConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.reps < 2 || self.pairs.is_empty() {
            return Err(invalid(
                "block moment needs n >= 1, reps >= 2 and a block pair",
            ));
        }
        for (i, j) in &self.pairs {
            Block::new(i.length, i.time)?;
            Block::new(j.length, j.time)?;
            if !neighboring(i, j) {
                return Err(Error::Core(dynwalk_core::Error::Domain(format!(
                    "blocks {} and {} are not neighboring",
                    format_block(i),
                    format_block(j)
                ))));
            }
        }
        Ok(())
    }

    /// Union of the length endpoints and of the time endpoints.
    fn grids(&self) -> (Vec<f64>, Vec<f64>) {
        let mut time = Vec::new();
        let mut length = Vec::new();
        for b in self.pairs.iter().flat_map(|(i, j)| [i, j]) {
            time.extend([b.time.0, b.time.1]);
            length.extend([b.length.0, b.length.1]);
        }
        for g in [&mut time, &mut length] {
            g.sort_by(f64::total_cmp);
            g.dedup();
        }
        (time, length)
    }
}

/// Two horizontal and two vertical neighboring pairs.
pub fn default_block_pairs() -> Vec<(Block, Block)> {
    let b = |l0, l1, u0, u1| Block {
        length: (l0, l1),
        time: (u0, u1),
    };
    vec![
        (b(0.0, 0.5, 0.0, 0.5), b(0.5, 1.0, 0.0, 0.5)),
        (b(0.2, 0.4, 0.3, 0.9), b(0.4, 1.0, 0.3, 0.9)),
        (b(0.0, 0.5, 0.0, 0.5), b(0.0, 0.5, 0.5, 1.0)),
        (b(0.25, 1.0, 0.1, 0.2), b(0.25, 1.0, 0.2, 0.7)),
    ]
}

fn format_block(b: &Block) -> String {
    format!("{}:{}:{}:{}", b.length.0, b.length.1, b.time.0, b.time.1)
}

fn parse_block(text: &str) -> Result<Block> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| invalid(format!("bad block {text:?}: {e}")))?;
    let [l0, l1, u0, u1] = parts[..] else {
        return Err(invalid(format!(
            "block {text:?} needs four numbers l0:l1:u0:u1"
        )));
    };
    Ok(Block::new((l0, l1), (u0, u1))?)
}

/// Parses `l0:l1:u0:u1/l0:l1:u0:u1;…`, one pair per `;`.
pub fn parse_block_pairs(text: &str) -> Result<Vec<(Block, Block)>> {
    text.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once('/')
                .ok_or_else(|| invalid(format!("block pair {pair:?} needs a '/'")))?;
            Ok((parse_block(a)?, parse_block(b)?))
        })
        .collect()
}

/// Renders pairs in the syntax read by [`parse_block_pairs`].
pub fn format_block_pairs(pairs: &[(Block, Block)]) -> String {
    pairs
        .iter()
        .map(|(i, j)| format!("{}/{}", format_block(i), format_block(j)))
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub first: Block,
    pub second: Block,
    /// `true` for a shared time side, `false` for a shared length side.
    pub horizontal: bool,
    pub moment: f64,
    pub se: f64,
    /// `10·|I|·|J|`.
    pub bound: f64,
    /// `|I|·|J|`, the product of variances in the limit.
    pub area_product: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub config: BlockConfig,
    pub rows: Vec<BlockRow>,
}

impl Tabular for BlockReport {
    fn rows(&self) -> Vec<CsvRow> {
        self.rows
            .iter()
            .enumerate()
            .map(|(k, r)| {
                moment_row(
                    "block_moment",
                    format!("{}/{}", format_block(&r.first), format_block(&r.second)),
                    k as f64,
                    r.moment,
                    r.se,
                    (0.0, r.bound),
                    pass_if(r.pass),
                    self.config.reps,
                    self.config.seed,
                )
            })
            .collect()
    }
}

pub fn run_block_moment_check(runner: &Runner, cfg: &BlockConfig) -> Result<BlockReport> {
    cfg.validate()?;
    let (time, length) = cfg.grids();
    let products = runner.try_map(cfg.reps, |r| {
        let seeds = PathSeeds::for_path(cfg.seed, r);
        let log = sample_clocks(cfg.n, 1.0, seeds.clock)?;
        let field = rescaled_field(cfg.n, &log, seeds.deviate, &time, &length)?;
        cfg.pairs
            .iter()
            .map(|(i, j)| {
                let (yi, yj) = (block_increment(&field, i)?, block_increment(&field, j)?);
                Ok(yi * yi * yj * yj)
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    let rows = cfg
        .pairs
        .iter()
        .enumerate()
        .map(|(k, (i, j))| {
            let xs: Vec<f64> = products.iter().map(|p| p[k]).collect();
            let (moment, se) = mean_se(&xs);
            let area_product = i.area() * j.area();
            let bound = MOMENT_CONSTANT * area_product;
            BlockRow {
                first: *i,
                second: *j,
                horizontal: i.time == j.time,
                moment,
                se,
                bound,
                area_product,
                pass: moment <= bound + 4.0 * se,
            }
        })
        .collect();
    Ok(BlockReport {
        config: cfg.clone(),
        rows,
    })
}
