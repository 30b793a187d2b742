"""Independent reference for the Iris experiment's full-coverage accuracy.

Pins the acceptance threshold for the default run (seed 42, 80/20 split,
standardized features) using scikit-learn classifiers instead of any code
from this repository. The split procedure is re-coded here on purpose:
Philox(seed) permutation, first round(0.8*N) indices are the train set.

Run from the repo root:  python tools/oracles/iris_reference.py
"""

import csv

import numpy as np
from sklearn.linear_model import LogisticRegression
from sklearn.neural_network import MLPClassifier

SEED = 42
TRAIN_FRACTION = 0.8

rows = []
with open("src/bayeshead/datasets/iris.csv", encoding="utf-8") as f:
    reader = csv.reader(f)
    header = next(reader)
    for r in reader:
        rows.append([float(v) for v in r])
data = np.array(rows)
X, y = data[:, :-1], data[:, -1].astype(int)
N = len(y)

rng = np.random.Generator(np.random.Philox(SEED))
perm = rng.permutation(N)
n_train = int(round(TRAIN_FRACTION * N))
tr, te = perm[:n_train], perm[n_train:]

mu, sd = X[tr].mean(axis=0), X[tr].std(axis=0)
sd[sd == 0.0] = 1.0
Xtr, Xte = (X[tr] - mu) / sd, (X[te] - mu) / sd

logreg = LogisticRegression(C=1.0, max_iter=5000).fit(Xtr, y[tr])
acc_lr = float((logreg.predict(Xte) == y[te]).mean())

mlp = MLPClassifier(hidden_layer_sizes=(8,), activation="tanh", alpha=1.0,
                    max_iter=5000, random_state=0).fit(Xtr, y[tr])
acc_mlp = float((mlp.predict(Xte) == y[te]).mean())

print(f"split sizes: train={len(tr)} test={len(te)}")
print(f"logistic regression test accuracy: {acc_lr:.4f}")
print(f"mlp(8, tanh) test accuracy:        {acc_mlp:.4f}")
print(f"suggested pinned threshold: {min(acc_lr, acc_mlp) - 1.0 / len(te):.4f}")
