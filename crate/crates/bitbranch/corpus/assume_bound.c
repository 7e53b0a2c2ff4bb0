// Assumptions over a conjunction bound the budget drawn from nondet.
int main() {
  int budget;
  int used;
  int cap;
  budget = *;
  cap = 1023;
  assume(budget >= 0);
  assume(budget <= (budget & cap));
  used = budget & cap;
  assert(used == budget);
  return 0;
}
