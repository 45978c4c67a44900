"""
Published figures of the Turkiye 2000-2022 jobless-growth study, used to audit
how far a run on the current data vintage lands from the printed tables.
"""
from typing import Dict, Iterable, List, Optional, Tuple

from models.schemas import DeterministicSpec, Report, VintageDelta

DESCRIPTIVE_TOLERANCE = 0.05
TAU_TOLERANCE = 0.3
F_TOLERANCE = 1.0

# symbol -> (mean, std, min, max)
TABLE_1: Dict[str, Tuple[float, float, float, float]] = {
    "AGR": (7.67, 1.40, 5.50, 10.20),
    "IND": (20.71, 2.10, 18.40, 27.10),
    "CON": (6.29, 1.32, 4.50, 8.50),
    "SER": (53.93, 1.26, 51.20, 57.20),
    "UNP": (10.68, 1.59, 6.50, 14.03),
    "INF": (18.71, 18.30, 6.25, 72.31),
}

# spec -> symbol -> (ADF level, ADF diff, PP level, PP diff)
TABLE_2: Dict[DeterministicSpec, Dict[str, Tuple[float, float, float, float]]] = {
    DeterministicSpec.CONSTANT: {
        "UNP": (-1.499, -3.512, -1.900, -3.666),
        "AGR": (-1.613, -5.422, -1.511, -5.578),
        "IND": (-1.167, -5.465, -1.120, -3.485),
        "CON": (-2.037, -3.108, -1.242, -3.147),
        "SER": (-2.420, -4.633, -2.420, -4.628),
        "INF": (-1.276, -4.242, -1.436, -4.231),
    },
    DeterministicSpec.CONSTANT_TREND: {
        "UNP": (-1.561, -3.517, -2.402, -3.510),
        "AGR": (-3.151, -5.269, -3.185, -5.405),
        "IND": (-1.666, -5.552, -2.450, -8.396),
        "CON": (-0.390, -3.654, -0.390, -3.922),
        "SER": (-2.271, -4.580, -2.271, -4.577),
        "INF": (-1.118, -4.677, -1.201, -3.316),
    },
}

TABLE_3_F = 5.557

TABLE_4_SHORT_RUN = {"AGR": -0.471, "IND": -0.680, "CON": -0.899, "SER": -1.383, "INF": -0.062}
TABLE_4_ECT = -0.118
TABLE_4_LONG_RUN = {"AGR": -2.380, "IND": -4.057, "CON": -1.761, "SER": -3.664, "INF": -0.548, "C": 37.253}

TABLE_5_FMOLS = {"AGR": -1.470, "IND": -1.904, "CON": -1.229, "SER": -1.830, "INF": -0.104, "C": 20.886}
TABLE_5_CCR = {"AGR": -1.583, "IND": -2.082, "CON": -1.300, "SER": -2.160, "INF": -0.097, "C": 23.079}


def _delta(table: str, row: str, column: str, reported: float, computed: Optional[float],
           tolerance: Optional[float]) -> VintageDelta:
    if computed is None:
        return VintageDelta(table=table, row=row, column=column, reported=reported, tolerance=tolerance)
    delta = computed - reported
    return VintageDelta(
        table=table,
        row=row,
        column=column,
        reported=reported,
        computed=computed,
        delta=delta,
        tolerance=tolerance,
        within_tolerance=None if tolerance is None else abs(delta) <= tolerance + 1e-12,
    )


def _coefficient_deltas(table: str, column: str, published: Dict[str, float], rows: Iterable) -> List[VintageDelta]:
    computed = {r.name: r.coefficient for r in rows}
    return [
        _delta(table, name, column, value, computed[name], None)
        for name, value in published.items()
        if name in computed
    ]


def vintage_deltas(report: Report) -> List[VintageDelta]:
    """Reported-versus-computed cells for every published figure the report reproduces"""
    deltas: List[VintageDelta] = []

    if report.descriptive is not None:
        for row in report.descriptive.rows:
            if row.symbol not in TABLE_1:
                continue
            for column, reported, computed in zip(
                ("mean", "std", "min", "max"), TABLE_1[row.symbol], (row.mean, row.std, row.min, row.max)
            ):
                deltas.append(_delta("1", row.symbol, column, reported, computed, DESCRIPTIVE_TOLERANCE))

    if report.unit_root is not None:
        for row in report.unit_root.rows:
            published = TABLE_2[row.spec].get(row.variable)
            if published is None:
                continue
            cells = (row.adf_level, row.adf_diff, row.pp_level, row.pp_diff)
            columns = ("adf_level", "adf_diff", "pp_level", "pp_diff")
            for column, reported, cell in zip(columns, published, cells):
                deltas.append(
                    _delta("2", f"{row.variable} [{row.spec.value}]", column, reported, cell.value, TAU_TOLERANCE)
                )

    bounds = report.bounds
    if bounds is not None and bounds.f_stat is not None and bounds.model.startswith("UNP ="):
        deltas.append(_delta("3", bounds.model, "F-statistic", TABLE_3_F, bounds.f_stat, F_TOLERANCE))

    ecm = report.ecm
    if ecm is not None and ecm.dependent == "UNP":
        deltas.extend(_coefficient_deltas("4", "short-run", TABLE_4_SHORT_RUN, ecm.short_run))
        if ecm.ect is not None:
            deltas.append(_delta("4", "ECT(-1)", "short-run", TABLE_4_ECT, ecm.ect.coefficient, None))
        deltas.extend(_coefficient_deltas("4", "long-run", TABLE_4_LONG_RUN, ecm.long_run))

    robust = report.robustness
    if robust is not None and robust.dependent == "UNP":
        deltas.extend(_coefficient_deltas("5", "FMOLS", TABLE_5_FMOLS, robust.fmols))
        deltas.extend(_coefficient_deltas("5", "CCR", TABLE_5_CCR, robust.ccr))

    return deltas
