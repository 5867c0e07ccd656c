"""
Band-splitting report of a three-port network (input, FM branch, GSM branch).
"""

from dataclasses import dataclass

import pandas as pd

from rectiforge.netlist import Circuit

from .sparams import s_parameters

REPORT_COLUMNS = ["band", "freq_hz", "s11_db", "s21_db", "s31_db", "s23_db"]


@dataclass
class DuplexerReport:
    table: pd.DataFrame
    selective: bool


def duplexer_report(circuit: Circuit, f_fm: float, f_gsm: float, params=None) -> DuplexerReport:
    """S11, S21, S31 and S23 (dB) at both bands.

    The network is selective when port 2 receives more than port 3 at the FM
    frequency, and port 3 more than port 2 at the GSM frequency.
    """
    if len(circuit.ports) != 3:
        raise ValueError(
            f"A duplexer report needs exactly 3 ports, the circuit has {len(circuit.ports)}"
        )
    fm, gsm = s_parameters(circuit, [f_fm, f_gsm], params=params)
    rows = [
        [band, s.freq, s.db(1, 1), s.db(2, 1), s.db(3, 1), s.db(2, 3)]
        for band, s in (("FM", fm), ("GSM", gsm))
    ]
    table = pd.DataFrame(rows, columns=REPORT_COLUMNS)
    selective = fm.db(2, 1) > fm.db(3, 1) and gsm.db(3, 1) > gsm.db(2, 1)
    return DuplexerReport(table=table, selective=bool(selective))
