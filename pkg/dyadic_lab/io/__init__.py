from dyadic_lab.io.cell_csv import read_cell_csv, write_cell_csv
from dyadic_lab.io.reports import write_csv, write_json

__all__ = ["read_cell_csv", "write_cell_csv", "write_csv", "write_json"]
