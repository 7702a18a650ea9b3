#!/usr/bin/env python3
"""Writes the small synthetic corpus used by the end-to-end tests.

Output is deterministic for a given --seed, so the generated files can be
checked in and regenerated without diffs.

    python3 tools/gen_fixture_corpus.py tests/data/fixture_corpus
"""

import argparse
import csv
import gzip
import io
import json
import os
import random

YEARS = (2016, 2017, 2018)
VENDORS = {
    "SYMANTEC_IPS": ("symantec_ips", "Attack Signature"),
    "AVAST": ("avast", "Detection"),
    "TRENDMICRO": ("trend_micro", "Rule"),
}
WORDS_HOT = ["exploit", "poc", "rce", "wild", "0day", "metasploit", "critical", "urgent", "attack"]
WORDS_COLD = ["advisory", "update", "patch", "fix", "vulnerability", "ssl", "warning", "xss", "sql"]
FILLER = ["new", "details", "for", "in", "the", "see", "via", "affects", "version", "release", "read"]


def cvss2(rng, hot):
    av = rng.choice("NNN" if hot else "LAN")
    ac = rng.choice("LL" if hot else "LMH")
    au = rng.choice("N" if hot else "NSM")
    imp = lambda: rng.choice("PCC" if hot else "NPC")
    vec = f"AV:{av}/AC:{ac}/Au:{au}/C:{imp()}/I:{imp()}/A:{imp()}"
    base = round(rng.uniform(7.0, 10.0) if hot else rng.uniform(2.0, 7.5), 1)
    return {
        "cvssV2": {"version": "2.0", "vectorString": vec, "baseScore": base},
        "impactScore": round(rng.uniform(2.9, 10.0), 1),
        "exploitabilityScore": round(rng.uniform(8.0, 10.0) if hot else rng.uniform(1.5, 10.0), 1),
    }


def cvss3(rng, hot):
    vec = "CVSS:3.0/AV:{}/AC:{}/PR:{}/UI:{}/S:{}/C:{}/I:{}/A:{}".format(
        rng.choice("NN" if hot else "NALP"), rng.choice("L" if hot else "LH"), rng.choice("N" if hot else "NLH"),
        rng.choice("N" if hot else "NR"), rng.choice("UC"), rng.choice("H" if hot else "NLH"),
        rng.choice("HL" if hot else "NLH"), rng.choice("H" if hot else "NLH"))
    return {
        "cvssV3": {"version": "3.0", "vectorString": vec,
                   "baseScore": round(rng.uniform(8.0, 10.0) if hot else rng.uniform(3.0, 8.0), 1)},
        "impactScore": round(rng.uniform(3.6, 6.0), 1),
        "exploitabilityScore": round(rng.uniform(2.8, 3.9) if hot else rng.uniform(0.5, 3.9), 1),
    }


def nvd_item(rng, cve, year, hot):
    vendor = rng.choice(["acme", "globex", "initech", "umbrella", "hooli"])
    product = rng.choice(["server", "browser", "router", "cms", "mail"])
    desc = "A vulnerability in {} {} allows {} attackers to {}.".format(
        vendor, product, "remote" if hot or rng.random() < 0.3 else "local",
        "execute arbitrary code" if hot and rng.random() < 0.7 else "cause a denial of service")
    refs = [{"url": f"https://{vendor}.example/advisory/{cve}", "tags": ["Vendor Advisory"]}]
    if hot and rng.random() < 0.6:
        refs.append({"url": f"https://exploits.example/{cve}", "tags": ["Exploit", "Third Party Advisory"]})
    if rng.random() < 0.5:
        refs.append({"url": f"https://{vendor}.example/patch/{cve}", "tags": ["Patch"]})
    cpes = [{"vulnerable": True, "cpe23Uri": f"cpe:2.3:a:{vendor}:{product}:{rng.randint(1, 9)}.{v}:*:*:*:*:*:*:*"}
            for v in range(rng.randint(1, 4))]
    impact = {"baseMetricV2": cvss2(rng, hot)}
    if year >= 2017 or rng.random() < 0.5:
        impact["baseMetricV3"] = cvss3(rng, hot)
    return {
        "cve": {
            "data_type": "CVE",
            "CVE_data_meta": {"ID": cve, "ASSIGNER": "cve@mitre.org"},
            "problemtype": {"problemtype_data": [{"description": [
                {"lang": "en", "value": rng.choice(["CWE-79", "CWE-89", "CWE-119", "CWE-20", "CWE-787"])}]}]},
            "references": {"reference_data": refs},
            "description": {"description_data": [{"lang": "en", "value": desc}]},
        },
        "configurations": {"CVE_data_version": "4.0", "nodes": [{"operator": "OR", "cpe_match": cpes}]},
        "impact": impact,
        "publishedDate": f"{year}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}T10:00Z",
        "lastModifiedDate": f"{year + 1}-01-01T00:00Z",
    }


def tweet_text(rng, cves, hot):
    words = [rng.choice(WORDS_HOT if hot and rng.random() < 0.6 else WORDS_COLD) for _ in range(rng.randint(1, 3))]
    words += [rng.choice(FILLER) for _ in range(rng.randint(2, 5))]
    rng.shuffle(words)
    ids = " ".join(c if rng.random() < 0.8 else c.lower() for c in cves)
    return " ".join(words[:2]) + " " + ids + " " + " ".join(words[2:])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir")
    ap.add_argument("--seed", type=int, default=20)
    ap.add_argument("--cves", type=int, default=200)
    ap.add_argument("--tweets", type=int, default=800)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = args.out_dir
    os.makedirs(out, exist_ok=True)

    cves = []
    for i in range(args.cves):
        year = YEARS[i % len(YEARS)]
        cves.append((f"CVE-{year}-{1000 + 7 * i}", year, rng.random() < 0.25))
    # A couple of five-digit sequence numbers.
    cves[3] = (f"CVE-{cves[3][1]}-10042", cves[3][1], cves[3][2])

    # NVD: the first two years in one plain file, the last gzipped. One entry is
    # malformed and one is repeated across the files.
    items = {y: [nvd_item(rng, c, y, hot) for c, yy, hot in cves if yy == y] for y in YEARS}
    plain = items[2016] + items[2017] + [{"cve": {"CVE_data_meta": {}}, "publishedDate": "2016-01-01T00:00Z"}]
    with open(os.path.join(out, "nvdcve-1.0-2016-2017.json"), "w") as f:
        json.dump({"CVE_data_type": "CVE", "CVE_data_format": "MITRE", "CVE_data_version": "4.0",
                   "CVE_Items": plain}, f, indent=1, sort_keys=True)
    gz = items[2018] + [items[2017][0]]
    buf = io.BytesIO()
    with gzip.GzipFile(filename="", mode="wb", fileobj=buf, mtime=0) as g:
        g.write(json.dumps({"CVE_data_type": "CVE", "CVE_Items": gz}, sort_keys=True).encode())
    with open(os.path.join(out, "nvdcve-1.1-2018.json.gz"), "wb") as f:
        f.write(buf.getvalue())

    # Tweets: exploited CVEs get more chatter and wider reach.
    authors = [(f"{100000 + a}", rng.randint(10, 200000), rng.random() < 0.1) for a in range(120)]
    weights = [6 if hot else 1 for _, _, hot in cves]
    lines = []
    for t in range(args.tweets):
        (cve, year, hot), = rng.choices(cves, weights=weights)
        mentioned = [cve]
        if rng.random() < 0.1:
            mentioned.append(rng.choice(cves)[0])
        if rng.random() < 0.03:
            mentioned.append(f"CVE-2014-{rng.randint(1000, 9999)}")
        author, followers, verified = rng.choice(authors)
        lines.append(json.dumps({
            "tweet_id": str(900000000 + t),
            "author_id": author,
            "posted_at": f"{year}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}T{rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}:00Z",
            "text": tweet_text(rng, mentioned, hot),
            "retweet_count": rng.randint(0, 80 if hot else 10),
            "favorite_count": rng.randint(0, 120 if hot else 15),
            "author_followers": followers,
            "author_friends": rng.randint(0, 3000),
            "author_verified": verified,
            "hashtag_count": rng.randint(0, 4),
            "url_count": rng.randint(0, 2),
        }, sort_keys=True))
    lines.insert(len(lines) // 2, '{"tweet_id": "broken", "text": 5}')
    with open(os.path.join(out, "tweets.jsonl"), "w") as f:
        f.write("\n".join(lines) + "\n")

    # Vendor signature pages. Hot CVEs are usually covered by some vendor.
    hot_ids = [c for c, _, hot in cves if hot]
    for vi, (vendor, (dirname, label)) in enumerate(VENDORS.items()):
        d = os.path.join(out, "signatures", dirname)
        os.makedirs(d, exist_ok=True)
        covered = sorted(rng.sample(hot_ids, k=int(len(hot_ids) * 0.45)))
        pages = [covered[i:i + 2] for i in range(0, len(covered), 2)]
        for p, ids in enumerate(pages):
            sig = f"{dirname.upper()}-{3000 + 10 * vi + p}"
            date = f"{ids[0][4:8]}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
            body = "".join(f"<li>{c}</li>" for c in ids)
            with open(os.path.join(d, f"sig_{p:03d}.html"), "w") as f:
                f.write(f"<!DOCTYPE html>\n<html><head><title>{sig} exploit activity</title></head><body>\n"
                        f"<h1>{sig}</h1>\n<p>{label}: {sig}</p>\n<p>Published: {date}</p>\n"
                        f"<p>Detects attempts to exploit:</p><ul>{body}</ul>\n</body></html>\n")
        with open(os.path.join(d, "zz_index.html"), "w") as f:
            f.write("<!DOCTYPE html>\n<html><head><title>Index</title></head><body><p>No entries here.</p></body></html>\n")

    # Exploit-DB style listing and its CVE map.
    poc_ids = sorted({c for c, _, hot in cves if (hot and rng.random() < 0.5) or rng.random() < 0.1})
    with open(os.path.join(out, "files_exploits.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "file", "description", "date_published", "author", "type", "platform"])
        for i, c in enumerate(poc_ids):
            w.writerow([40000 + i, f"exploits/linux/remote/{40000 + i}.py", f"Product {c[9:]} - Remote Overflow",
                        f"{c[4:8]}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}", "someone", "remote", "linux"])
        w.writerow([49999, "exploits/php/webapps/49999.txt", "Unmapped entry", "2018-05-05", "x", "webapps", "php"])
    with open(os.path.join(out, "edb_cve_map.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["edb_id", "cve_id"])
        for i, c in enumerate(poc_ids):
            w.writerow([40000 + i, c])
        w.writerow([40000, "not-a-cve"])

    config = {
        "data": {
            "nvd": ["nvdcve-1.0-2016-2017.json", "nvdcve-1.1-2018.json.gz"],
            "tweets": "tweets.jsonl",
            "vendors": {v: os.path.join("signatures", dn) for v, (dn, _) in VENDORS.items()},
            "poc_listing": "files_exploits.csv",
            "poc_cve_map": "edb_cve_map.csv",
        },
        "label": "RW",
        "classifiers": [{"kind": "GBDT", "hyperparameters": {"n_trees": 50, "max_depth": 3}}],
        "sampler": {"kind": "ALLKNN", "k_max": 3},
        "k": 10,
        "seed": 7,
        "year_range": [YEARS[0], YEARS[-1]],
        "experiment": {"kind": "CV"},
    }
    with open(os.path.join(out, "config.json"), "w") as f:
        json.dump(config, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
