"""
Excel export of benchmark records
A Runs sheet with every record, a Summary sheet of mean net times and a
Metadata sheet
"""
import logging
from datetime import datetime
from pathlib import Path
from statistics import mean
from typing import Dict, Iterable, List, Optional, Tuple, Union

import openpyxl
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter

from benchmark.records import BASELINE_TASK, CSV_COLUMNS, BenchRecord, net_time

logger = logging.getLogger(__name__)

HEADER_FILL = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
HEADER_FONT = Font(bold=True, color="FFFFFF", size=11)
HEADER_ALIGNMENT = Alignment(horizontal="center", vertical="center", wrap_text=True)
BORDER = Border(
    left=Side(style='thin'),
    right=Side(style='thin'),
    top=Side(style='thin'),
    bottom=Side(style='thin')
)

SUMMARY_COLUMNS = ["variable", "value", "task", "runs", "timeouts", "errors", "mean_net_ms", "mean_result_size"]


def _write_sheet(ws, headers: List[str], rows: Iterable[List]) -> int:
    for col_idx, header in enumerate(headers, start=1):
        cell = ws.cell(row=1, column=col_idx, value=header)
        cell.fill = HEADER_FILL
        cell.font = HEADER_FONT
        cell.alignment = HEADER_ALIGNMENT
        cell.border = BORDER

    count = 0
    for row_idx, row in enumerate(rows, start=2):
        for col_idx, value in enumerate(row, start=1):
            ws.cell(row=row_idx, column=col_idx, value=value).border = BORDER
        count += 1

    for col_idx, header in enumerate(headers, start=1):
        ws.column_dimensions[get_column_letter(col_idx)].width = max(12, len(header) + 4)

    # Keep headers visible
    ws.freeze_panes = 'A2'
    return count


def summarize(records: Iterable[BenchRecord]) -> List[List]:
    """One row per (variable, value, task) in first-seen order"""
    records = list(records)
    groups: Dict[Tuple[str, int, str], List[BenchRecord]] = {}
    for record in records:
        groups.setdefault((record.variable, record.value, record.task), []).append(record)

    rows = []
    for (variable, value, task), runs in groups.items():
        if task == BASELINE_TASK:
            net: Union[float, str, None] = mean(run.wall_ms for run in runs)
        else:
            net = net_time(records, variable, task, value)
        errors = sum(1 for run in runs if run.error)
        if net == float("inf"):
            net = "error" if errors else "timeout"
        rows.append([
            variable, value, task, len(runs), sum(1 for run in runs if run.timeout), errors, net,
            mean(run.result_size for run in runs),
        ])
    return rows


def records_to_excel(records: Iterable[BenchRecord], excel_file: Union[str, Path],
                     metadata: Optional[Dict[str, object]] = None) -> None:
    """
    Write benchmark records to an Excel workbook

    Args:
        records: Records of one or more runs
        excel_file: Target .xlsx path
        metadata: Extra key/value pairs for the Metadata sheet
    """
    records = list(records)
    wb = openpyxl.Workbook()
    ws = wb.active
    ws.title = "Runs"
    _write_sheet(ws, CSV_COLUMNS, (
        [r.variable, r.value, r.task, r.repeat, r.wall_ms, r.baseline_ms,
         r.result_size, r.timeout, r.peak_kib, r.extension, r.error]
        for r in records
    ))

    _write_sheet(wb.create_sheet("Summary"), SUMMARY_COLUMNS, summarize(records))

    ws_meta = wb.create_sheet("Metadata")
    ws_meta.append(["Metadata"])
    ws_meta.append(["Total Runs", len(records)])
    ws_meta.append(["Generated At", datetime.now().isoformat()])
    for key, value in (metadata or {}).items():
        ws_meta.append([key, str(value)])
    ws_meta['A1'].font = Font(bold=True, size=14)
    ws_meta.column_dimensions['A'].width = 20
    ws_meta.column_dimensions['B'].width = 30

    excel_file = Path(excel_file)
    excel_file.parent.mkdir(parents=True, exist_ok=True)
    wb.save(excel_file)
    logger.info(f"Excel file written: {excel_file} (sheets: {', '.join(sheet.title for sheet in wb.worksheets)})")
