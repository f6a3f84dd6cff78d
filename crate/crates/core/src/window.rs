//! Splitting a series into pre- and post-event windows.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::data::ReturnSeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventWindowConfig {
    pub event_date: NaiveDate,
    pub pre_start: NaiveDate,
    pub pre_end: NaiveDate,
    pub post_start: NaiveDate,
    pub post_end: NaiveDate,
    pub require_equal_length: bool,
}

impl EventWindowConfig {
    pub fn new(
        event_date: NaiveDate,
        pre: (NaiveDate, NaiveDate),
        post: (NaiveDate, NaiveDate),
        require_equal_length: bool,
    ) -> Result<Self> {
        let cfg = Self {
            event_date,
            pre_start: pre.0,
            pre_end: pre.1,
            post_start: post.0,
            post_end: post.1,
            require_equal_length,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The 2017 Gulf-crisis design: 2016-04-03..2017-06-04 and
    /// 2017-06-06..2018-08-07 around 2017-06-05, equal lengths required.
    pub fn gulf_2017() -> Self {
        let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).expect("valid date");
        Self {
            event_date: d(2017, 6, 5),
            pre_start: d(2016, 4, 3),
            pre_end: d(2017, 6, 4),
            post_start: d(2017, 6, 6),
            post_end: d(2018, 8, 7),
            require_equal_length: true,
        }
    }

    /// Checks `pre_start < pre_end < event_date <= post_start < post_end`.
    pub fn validate(&self) -> Result<()> {
        let ordered = self.pre_start < self.pre_end
            && self.pre_end < self.event_date
            && self.event_date <= self.post_start
            && self.post_start < self.post_end;
        if ordered {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "window dates must satisfy pre_start < pre_end < event_date <= post_start < post_end \
                 (got {}..{}, event {}, {}..{})",
                self.pre_start, self.pre_end, self.event_date, self.post_start, self.post_end
            )))
        }
    }

    fn in_pre(&self, d: NaiveDate) -> bool {
        d >= self.pre_start && d <= self.pre_end && d < self.event_date
    }

    fn in_post(&self, d: NaiveDate) -> bool {
        d >= self.post_start && d <= self.post_end && d > self.event_date
    }
}

/// Returns the pre-window and post-window slices of `series`.
///
/// Window bounds are inclusive. The observation dated on the event day
/// belongs to neither window.
pub fn split_event(series: &ReturnSeries, cfg: &EventWindowConfig) -> Result<(ReturnSeries, ReturnSeries)> {
    cfg.validate()?;
    let pick = |keep: &dyn Fn(NaiveDate) -> bool| {
        let (dates, values): (Vec<_>, Vec<_>) = series
            .dates
            .iter()
            .zip(&series.values)
            .filter(|(d, _)| keep(**d))
            .map(|(d, v)| (*d, *v))
            .unzip();
        ReturnSeries {
            market: series.market.clone(),
            dates,
            values,
        }
    };
    let pre = pick(&|d| cfg.in_pre(d));
    let post = pick(&|d| cfg.in_post(d));
    if pre.is_empty() {
        return Err(Error::EmptyWindow(format!(
            "no observations of '{}' between {} and {}",
            series.market, cfg.pre_start, cfg.pre_end
        )));
    }
    if post.is_empty() {
        return Err(Error::EmptyWindow(format!(
            "no observations of '{}' between {} and {}",
            series.market, cfg.post_start, cfg.post_end
        )));
    }
    if cfg.require_equal_length && pre.len() != post.len() {
        return Err(Error::UnequalWindows {
            pre: pre.len(),
            post: post.len(),
        });
    }
    Ok((pre, post))
}
