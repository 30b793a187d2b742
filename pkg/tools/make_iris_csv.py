"""Regenerate the bundled Iris CSV from scikit-learn's copy of the UCI data.

Run from the repo root:  python tools/make_iris_csv.py
"""

import numpy as np
from sklearn.datasets import load_iris

OUT = "src/bayeshead/datasets/iris.csv"

iris = load_iris()
X = np.asarray(iris.data, dtype=np.float64)
y = np.asarray(iris.target, dtype=np.int64)

with open(OUT, "w", encoding="utf-8") as f:
    f.write("sepal_length,sepal_width,petal_length,petal_width,label\n")
    for row, lab in zip(X, y):
        f.write(",".join("%.17g" % v for v in row) + ",%d\n" % lab)

print("wrote %s: N=%d D=%d C=%d" % (OUT, X.shape[0], X.shape[1], y.max() + 1))
