import glob

import pandas as pd

from bloch.propagators.strategies import METHOD_EXPONENTIAL, METHOD_NAMES, METHOD_NEWTON


STATUS_MARKS = {"ok": "", "positivity_violated": " (out)", "error": " (error)"}


class BaseBenchmarkQuery:

    def __init__(self, root=None, results_df=None):
        self._root = root
        self._results_df = self._build_df() if results_df is None else results_df.copy()

    @classmethod
    def from_rows(cls, rows):
        return cls(results_df=pd.DataFrame([row.to_dict() for row in rows]))

    def _build_df(self):
        results_df_list = []

        for path in self._get_paths(self._root):
            results_df_list.append(pd.read_csv(path))

        return pd.concat(results_df_list, ignore_index=True)

    def _get_paths(self, root):
        return sorted(glob.glob(f"{root}/*.csv"))

    def _query_results(self, **kwargs):
        query = True
        for key, value in kwargs.items():
            query &= self._results_df[key] == value

        if len(kwargs) > 0:
            return self._results_df[query]

        return self._results_df


class MethodTableQuery(BaseBenchmarkQuery):

    def get_times(self, value="wall_time", **kwargs):
        results_df = self._query_results(**kwargs)
        return results_df.pivot_table(index="n_p", columns="method", values=value, aggfunc="mean")

    def get_table(self, **kwargs):
        results_df = self._query_results(**kwargs).copy()
        results_df["cell"] = [f"{time:.3g}{STATUS_MARKS.get(status, '')}" for time, status in zip(results_df["wall_time"], results_df["status"])]
        table = results_df.pivot(index="n_p", columns="method", values="cell")
        table = table[[m for m in METHOD_NAMES if m in table.columns]]
        table.rename(columns=METHOD_NAMES, inplace=True)

        return table

    def get_flagged(self, **kwargs):
        results_df = self._query_results(**kwargs)
        return results_df[results_df["status"] != "ok"][["method", "n_p", "status"]].reset_index(drop=True)


class ScalingQuery(BaseBenchmarkQuery):

    def get_times(self, value="wall_time", **kwargs):
        results_df = self._query_results(**kwargs)
        times = results_df.pivot_table(index="n_levels", columns="method", values=value, aggfunc="mean")
        return times[[METHOD_EXPONENTIAL, METHOD_NEWTON]]

    def get_ratios(self, value="liouville_step_time", **kwargs):
        times = self.get_times(value, **kwargs)
        return (times[METHOD_NEWTON] / times[METHOD_EXPONENTIAL]).rename("ratio")

    def get_table(self, value="liouville_step_time", **kwargs):
        table = self.get_times(value, **kwargs)
        table["ratio"] = self.get_ratios(value, **kwargs)
        return table.rename(columns=METHOD_NAMES)
