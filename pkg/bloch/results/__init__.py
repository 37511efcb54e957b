from .tables import MethodTableQuery, ScalingQuery
