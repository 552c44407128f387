"""
Константы: коды выхода CLI, имена проверок кампании
"""
from enum import IntEnum


class ExitCode(IntEnum):
    OK = 0
    USAGE = 1
    CONDITIONS_FAILED = 2
    SOLVER_FAILED = 3
    CAMPAIGN_FAILED = 4


# Файлы результатов
SOLUTION_FILE = "solution.csv"
REPORT_FILE = "report.txt"
CAMPAIGN_FILE = "campaign.csv"

# Относительный допуск равенства узлов сетки при отсечке
NODE_TIME_SLACK = 1e-9

# Заголовок CSV кампании
CAMPAIGN_COLUMNS = ("trial", "check", "passed", "margin", "seed", "detail")
