# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-12 17:40:12
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-16 08:55:39
"""
Data series for plotting empirical/asymptotic ratios against u.
No rendering happens here; the CSV is meant for external tools.
"""

from pathlib import Path

import pandas as pd

from common.config import PLOTDATA_COLUMNS
from extremes.errors import InvalidArgumentError


def emit_plotdata(table: pd.DataFrame, path: str | Path) -> Path:
    '''
    Write u against ratio, with the lower and upper band, as CSV.

    :param table: comparison table from compare_to_theory()
    :param path: destination file; parent directories are created
    :raises InvalidArgumentError: if the table is empty or lacks a column
    :return: the path written
    '''
    if table is None or table.empty:
        raise InvalidArgumentError("Cannot emit plot data from an empty table")
    missing = [col for col in PLOTDATA_COLUMNS if col not in table.columns]
    if missing:
        raise InvalidArgumentError("Comparison table lacks plot columns", {'missing': missing})
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    table[PLOTDATA_COLUMNS].to_csv(out, index=False)
    return out
