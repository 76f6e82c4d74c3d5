"""Command Layer Package"""

from dyadic_lab.commands import verify as verify, norms as norms, cauchy as cauchy, sweep as sweep
