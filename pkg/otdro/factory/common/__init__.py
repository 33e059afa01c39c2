from ._common import InfosMapping
